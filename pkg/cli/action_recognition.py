import argparse
import json
import os
import sys
import uuid

from core_data_modules.logging import Logger

from classify.model_io import read_model, write_model, read_model_header, deserialize_model, MODEL_MAGIC
from classify.softmax_regression import train_plane_models
from configuration.pipeline_configuration import PipelineConfiguration
from depth_io.data_models import SplitRule
from depth_io.dataset_manifest import build_manifest, read_label_mapping, read_manifest, split, write_manifest
from depth_io.depth_sequence_io import read_sequence_header
from encode_augment.data_models import IMAGE_FILE_SUFFIX
from encode_augment.encode_augment import encoded_views, write_image, read_image, augmented_copies
from fuse_eval.evaluation import evaluate, write_report, write_confusion_matrix_csv
from geometry.data_models import RotationGrid
from pipeline_logs.run_log import RunLog
from projection.data_models import ViewPlanes
from storage.google_cloud.artifact_storage import upload_artifacts, download_blob

log = Logger(__name__)

EXIT_SUCCESS = 0
EXIT_USAGE_ERROR = 1
EXIT_DATA_ERROR = 2
EXIT_NUMERIC_FAILURE = 3

MANIFEST_FILE_NAME = "manifest.csv"
TRAINING_RUN_FILE_NAME = "training_run.json"


def model_file_name(plane):
    return f"model_{plane}.bin"


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_scales(text):
    """
    Parses a list of temporal scales such as "1,2" or "1-5".

    :rtype: list of int
    """
    scales = []
    try:
        for part in text.split(","):
            if "-" in part:
                start, stop = part.split("-")
                scales.extend(range(int(start), int(stop) + 1))
            else:
                scales.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not a list of scales such as '1,2' or '1-5'")

    if len(scales) == 0 or any(scale < 1 for scale in scales):
        raise argparse.ArgumentTypeError(f"Scales must be integers >= 1, got '{text}'")
    return sorted(set(scales))


def parse_subjects(text):
    try:
        return [int(subject) for subject in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not a comma-separated list of subject ids")


def _add_config_argument(parser):
    parser.add_argument("--config", metavar="config-file",
                        help="JSON pipeline configuration. Command-line flags override its values")


def _add_split_arguments(parser):
    parser.add_argument("--split", choices=["odd-train"], default=None,
                        help="Train on odd-numbered subjects and test on even-numbered ones (the default)")
    parser.add_argument("--train-subjects", type=parse_subjects, help="Comma-separated subjects to train on")
    parser.add_argument("--test-subjects", type=parse_subjects, help="Comma-separated subjects to test on")


def _add_upload_arguments(parser):
    parser.add_argument("--upload-url", metavar="gs-url",
                        help="gs URL of a directory to upload the run's outputs to")
    parser.add_argument("--gcs-credentials", metavar="credentials-file",
                        help="Path to a Google Cloud service account credentials file for gs URLs")


def _build_parser():
    parser = _ArgumentParser(prog="depth-action-recognition",
                             description="Recognises actions in depth videos from hierarchical depth motion maps")
    subparsers = parser.add_subparsers(dest="command", required=True)

    extract_parser = subparsers.add_parser("extract", help="Encodes the motion maps of a dataset as PNG images")
    extract_parser.add_argument("--input", required=True, help="Dataset root directory of *_depth.bin files")
    extract_parser.add_argument("--out", required=True, help="Directory to write the images and manifest to")
    extract_parser.add_argument("--scales", type=parse_scales, help="Temporal scales, e.g. '1,5' or '1-5'")
    extract_parser.add_argument("--rotate", action="store_true",
                                help="Also extract the views of every rotation of the theta/beta grids")
    extract_parser.add_argument("--theta", help="Theta rotation grid, as start:step:stop")
    extract_parser.add_argument("--beta", help="Beta rotation grid, as start:step:stop")
    weighting = extract_parser.add_mutually_exclusive_group()
    weighting.add_argument("--weighted", dest="weighted", action="store_true", default=None,
                           help="Accumulate motion with the weighted recursion")
    weighting.add_argument("--unweighted", dest="weighted", action="store_false",
                           help="Accumulate motion as a plain sum")
    extract_parser.add_argument("--gamma", type=float, help="Weight of the newest frame difference")
    extract_parser.add_argument("--delta", type=float, help="Weight of the accumulated history")
    extract_parser.add_argument("--mapping", help="Label mapping file for combined datasets")
    _add_config_argument(extract_parser)

    train_parser = subparsers.add_parser("train", help="Trains one classifier per view plane")
    train_parser.add_argument("--images", required=True, help="Directory of images written by 'extract'")
    train_parser.add_argument("--manifest", required=True, help="Manifest written by 'extract'")
    _add_split_arguments(train_parser)
    train_parser.add_argument("--out", required=True, help="Directory to write the models to")
    train_parser.add_argument("--seed", type=int, help="Seed of augmentation and training")
    train_parser.add_argument("--init-models", help="Directory or gs URL of models to fine-tune from")
    _add_config_argument(train_parser)
    _add_upload_arguments(train_parser)

    eval_parser = subparsers.add_parser("eval", help="Evaluates trained classifiers on the test side of a dataset")
    eval_parser.add_argument("--input", required=True, help="Dataset root directory of *_depth.bin files")
    eval_parser.add_argument("--models", required=True, help="Directory or gs URL of models written by 'train'")
    eval_parser.add_argument("--scales", type=parse_scales, help="Temporal scales, e.g. '1,5' or '1-5'")
    _add_split_arguments(eval_parser)
    eval_parser.add_argument("--mapping", help="Label mapping file for combined datasets")
    eval_parser.add_argument("--report", required=True, help="Path to write the JSON report to")
    eval_parser.add_argument("--confusion-csv", help="Path to write the confusion matrix CSV to")
    _add_config_argument(eval_parser)
    _add_upload_arguments(eval_parser)

    info_parser = subparsers.add_parser("info", help="Describes a depth file, model or encoded image")
    info_parser.add_argument("file", help="File to describe")

    return parser


def _load_configuration(args):
    config = PipelineConfiguration() if args.config is None else PipelineConfiguration.load(args.config)

    d = config.to_dict()
    if getattr(args, "scales", None) is not None:
        d["scales"] = args.scales
    if getattr(args, "theta", None) is not None:
        d["theta_grid"] = args.theta
    if getattr(args, "beta", None) is not None:
        d["beta_grid"] = args.beta
    if getattr(args, "weighted", None) is not None:
        d["weighted"] = args.weighted
    for key in ["gamma", "delta", "seed"]:
        if getattr(args, key, None) is not None:
            d[key] = getattr(args, key)
    return PipelineConfiguration.from_dict(d)


def _split_rule(args):
    if args.train_subjects is None and args.test_subjects is None:
        return SplitRule.odd_train()
    if args.split is not None:
        raise UsageError("--split cannot be combined with --train-subjects/--test-subjects")
    if args.train_subjects is None or args.test_subjects is None:
        raise UsageError("--train-subjects and --test-subjects must be given together")
    return SplitRule.explicit(args.train_subjects, args.test_subjects)


def _check_upload_arguments(args):
    if args.upload_url is not None and args.gcs_credentials is None:
        raise UsageError("--upload-url needs --gcs-credentials")


def _read_models(args, location):
    if not location.startswith("gs://"):
        return {plane: read_model(os.path.join(location, model_file_name(plane))) for plane in ViewPlanes.VALUES}

    if args.gcs_credentials is None:
        raise UsageError(f"Reading models from '{location}' needs --gcs-credentials")
    models = dict()
    for plane in ViewPlanes.VALUES:
        blob_url = f"{location.rstrip('/')}/{model_file_name(plane)}"
        models[plane] = deserialize_model(download_blob(args.gcs_credentials, blob_url))
    return models


def _upload(args, paths):
    if args.upload_url is not None:
        upload_artifacts(args.gcs_credentials, args.upload_url, paths)


def _build_manifest(args):
    mapping = None if args.mapping is None else read_label_mapping(args.mapping)
    return build_manifest(args.input, mapping)


def run_extract(args):
    config = _load_configuration(args)
    manifest = _build_manifest(args)
    grid = config.rotation_grid() if args.rotate else RotationGrid.none()
    cfg = config.extraction_config()
    os.makedirs(args.out, exist_ok=True)

    written = 0
    failed = 0
    for i, entry in enumerate(manifest):
        try:
            images = encoded_views(entry, grid, config.scales, config.weight_params(), cfg, config.canvas_size)
        except (ValueError, OSError) as e:
            log.warning(f"Skipping sample {entry.sample_id} of source '{entry.source_tag}': {e}")
            failed += 1
            continue

        for image in images:
            write_image(image, os.path.join(args.out, image.provenance.file_name()))
        written += len(images)
        log.info(f"Extracted sample {i + 1}/{len(manifest)} {entry.sample_id} ({len(images)} images)")

    write_manifest(manifest, os.path.join(args.out, MANIFEST_FILE_NAME))
    log.info(f"Wrote {written} images of {len(manifest) - failed} samples to '{args.out}', "
             f"{failed} samples failed")
    if written == 0:
        raise ValueError("No sample could be extracted")
    return EXIT_SUCCESS


def _training_images(images_dir, train_manifest):
    """
    Yields (image, manifest entry) for each image in `images_dir` whose source tree and sample id are in
    `train_manifest`.
    """
    for file_name in sorted(os.listdir(images_dir)):
        if not file_name.endswith(IMAGE_FILE_SUFFIX):
            continue
        image = read_image(os.path.join(images_dir, file_name))
        if image.provenance is None:
            log.warning(f"Skipping image '{file_name}', which has no provenance in its file name")
            continue
        entry = train_manifest.entry_for(image.provenance.source_tag, image.provenance.sample_id)
        if entry is None:
            continue
        yield image, entry


def run_train(args):
    _check_upload_arguments(args)
    rule = _split_rule(args)
    config = _load_configuration(args)
    run_log = RunLog("train", str(uuid.uuid4()))

    manifest = read_manifest(args.manifest)
    train_manifest, _ = split(manifest, rule)
    run_log.log_event("LoadedManifest")

    spec = config.augment_spec()
    image_count = 0

    def stream():
        nonlocal image_count
        for image, entry in _training_images(args.images, train_manifest):
            image_count += 1
            for augmented in augmented_copies(image, spec):
                yield augmented, entry.label, image.provenance.plane

    initial_models = None
    if args.init_models is not None:
        initial_models = _read_models(args, args.init_models)

    models = train_plane_models(stream(), manifest.class_count, config.train_config(), config.feature_side,
                                initial_models)
    run_log.log_event("TrainedModels")

    paths = []
    for plane, model in models.items():
        path = os.path.join(args.out, model_file_name(plane))
        write_model(model, path)
        paths.append(path)

    training_run = {
        "configuration": config.to_dict(),
        "split": rule.to_dict(),
        "class_count": manifest.class_count,
        "train_samples": len(train_manifest),
        "train_images": image_count,
        "fine_tuned": initial_models is not None,
        "final_loss": {plane: model.final_loss for plane, model in models.items()},
        "loss_history": {plane: model.loss_history for plane, model in models.items()},
        "run_log": run_log.to_dict()
    }
    training_run_path = os.path.join(args.out, TRAINING_RUN_FILE_NAME)
    with open(training_run_path, "w", encoding="utf-8") as f:
        json.dump(training_run, f, indent=2)
    paths.append(training_run_path)

    _upload(args, paths)
    return EXIT_SUCCESS


def run_eval(args):
    _check_upload_arguments(args)
    rule = _split_rule(args)
    config = _load_configuration(args)
    run_log = RunLog("eval", str(uuid.uuid4()))

    _, test_manifest = split(_build_manifest(args), rule)
    models = _read_models(args, args.models)
    feature_dimension = 3 * config.feature_side ** 2
    for plane, model in models.items():
        if model.class_count != test_manifest.class_count or model.feature_dimension != feature_dimension:
            raise ValueError(f"Model of plane '{plane}' is {model.class_count}x{model.feature_dimension} but the "
                             f"dataset needs {test_manifest.class_count}x{feature_dimension}")
    run_log.log_event("LoadedModels")

    settings = {
        "configuration": config.to_dict(),
        "split": rule.to_dict(),
        "scales": config.scales,
        "models": args.models
    }
    report = evaluate(test_manifest, models, config.scales, config.extraction_config(), config.weight_params(),
                      config.canvas_size, config.crop_size, config.feature_side, settings)
    run_log.log_event("Evaluated")
    report.settings["run_log"] = run_log.to_dict()

    write_report(report, args.report)
    paths = [args.report]
    if args.confusion_csv is not None:
        write_confusion_matrix_csv(report, args.confusion_csv)
        paths.append(args.confusion_csv)

    _upload(args, paths)
    return EXIT_SUCCESS


def run_info(args):
    path = args.file
    if path.endswith(IMAGE_FILE_SUFFIX):
        image = read_image(path)
        info = {
            "type": "image",
            "height": image.height,
            "width": image.width,
            "provenance": None if image.provenance is None else image.provenance.to_dict()
        }
    else:
        with open(path, "rb") as f:
            magic = f.read(len(MODEL_MAGIC))
        if magic == MODEL_MAGIC:
            with open(path, "rb") as f:
                class_count, feature_dimension = read_model_header(f.read())
            info = {"type": "model", "class_count": class_count, "feature_dimension": feature_dimension}
        else:
            frame_count, width, height, file_size = read_sequence_header(path)
            info = {"type": "depth", "frame_count": frame_count, "width": width, "height": height,
                    "file_size": file_size}

    print(json.dumps(info, indent=2))
    return EXIT_SUCCESS


_COMMANDS = {
    "extract": run_extract,
    "train": run_train,
    "eval": run_eval,
    "info": run_info
}


def main(argv=None):
    """
    Runs the command line tool.

    :param argv: Arguments, excluding the program name. Defaults to sys.argv[1:].
    :type argv: list of str | None
    :return: Exit code: 0 on success, 1 on a usage error, 2 on a data error, 3 on a numeric failure.
    :rtype: int
    """
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except SystemExit as e:
        return e.code
    except UsageError as e:
        log.error(str(e))
        parser.print_usage(sys.stderr)
        return EXIT_USAGE_ERROR
    except ArithmeticError as e:
        log.error(f"Numeric failure: {e}")
        return EXIT_NUMERIC_FAILURE
    except (ValueError, OSError) as e:
        log.error(f"{type(e).__name__}: {e}")
        return EXIT_DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
