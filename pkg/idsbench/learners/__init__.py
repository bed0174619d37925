from .specs import FAMILIES, ForestParams, GbmParams, GlmParams, LearnerSpec, MlpParams
from .tree import DecisionTree, Split, TreeBuilder, TreeNode, best_split
from .glm import GlmModel, glm_loss_and_grad, train_glm
from .forest import ForestModel, train_random_forest
from .gbm import GbmModel, train_gbm
from .mlp import MlpModel, mlp_loss_and_grads, train_mlp
from .base import TrainedModel, predict_proba, train_model
from .serialization import deserialize, load_model, save_model, serialize

__all__ = [
    'FAMILIES', 'ForestParams', 'GbmParams', 'GlmParams', 'LearnerSpec', 'MlpParams',
    'DecisionTree', 'Split', 'TreeBuilder', 'TreeNode', 'best_split',
    'GlmModel', 'glm_loss_and_grad', 'train_glm',
    'ForestModel', 'train_random_forest',
    'GbmModel', 'train_gbm',
    'MlpModel', 'mlp_loss_and_grads', 'train_mlp',
    'TrainedModel', 'predict_proba', 'train_model',
    'deserialize', 'load_model', 'save_model', 'serialize',
]
