"""ElbowSig core algorithms

- data_model: Dataset, RngSpec and CSV I/O
- clustering: the four clustering backends and their heterogeneity sequences
- elbow: the elbow statistic
- reference_gen: null reference generators and reference ensembles
- inference: empirical p-values, threshold calibration, BH FDR and the significance report
- baselines: gap statistic and validity indices
- theory: closed-form null predictions
- simstudy: synthetic data and experiment harnesses
"""
