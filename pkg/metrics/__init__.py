from metrics.losses import LossWeights, l_deg, l_res, l_sup, l_total, step_weights
from metrics.quality import psnr, ssim
from metrics.report import MetricRow, classifier_accuracy, summarize, write_metric_csv
