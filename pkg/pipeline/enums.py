from django.db import models


class Stage(models.TextChoices):
    MEASURE = "measure", "Measure mesh"
    FGS = "fgs", "Flexible grasping space"
    MORPH = "morph", "Grasp morphing"
    SLICE = "slice", "Slice and masks"
    ENERGY = "energy", "Analytic energy"
    TRAIN = "train", "Train predictor"
    PREDICT = "predict", "Predict layer energy"
    OPTIMIZE = "optimize", "NSGA-II search"
    PIPELINE = "pipeline", "Full pipeline"
    EXPORT_HAND = "export_hand", "Export synthetic hand"


class RunStatus(models.TextChoices):
    RUNNING = "running", "Running"
    SUCCEEDED = "succeeded", "Succeeded"
    FAILED = "failed", "Failed"
