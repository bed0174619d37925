# Benchmark toolkit for ML-based intrusion and malware detection
__version__ = "1.0.0"
