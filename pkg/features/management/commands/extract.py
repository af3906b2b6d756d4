"""
Management command to extract features from a recorded dataset.

Usage:
    python manage.py extract                          # Method and channels from config
    python manage.py extract --method FFT --channels A1
    python manage.py extract --all                    # Every method x channel set
    python manage.py extract --manifest data/manifest.csv --out runs/demo
"""
from core.commands import PipelineCommand
from core.models import CHANNEL_SET_ORDER, METHOD_ORDER
from core.recordings import read_manifest
from features.services import FeatureService
from features.matrix import write_store


class Command(PipelineCommand):
    help = 'Preprocess recordings and write a feature store per method and channel set'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            '--manifest',
            help='Manifest CSV (default: manifest.csv in the data directory)'
        )
        parser.add_argument(
            '--all',
            action='store_true',
            help='Extract all four methods for all three channel sets'
        )

    def run(self, config, **options):
        manifest = read_manifest(options.get('manifest') or config.manifest_path)

        if options['all']:
            combos = [(m, c) for m in METHOD_ORDER for c in CHANNEL_SET_ORDER]
        else:
            combos = [(config.method, config.channel_set)]

        for method, channel_set in combos:
            service = FeatureService(config.with_method(method, channel_set))
            matrix = service.extract(manifest)
            path = write_store(matrix, service.store_path())
            self.stdout.write(
                f"{method} {channel_set}: {matrix.n_rows} rows x {matrix.n_features} features"
            )
            self.stdout.write(self.style.SUCCESS(f"Wrote {path}"))
