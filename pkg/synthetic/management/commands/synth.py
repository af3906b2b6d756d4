"""
Management command to generate a synthetic bearing dataset.

Usage:
    python manage.py synth                          # Default grid into the data directory
    python manage.py synth --data data/demo --seed 7
    python manage.py synth --campaign-runs          # 6/2/2 healthy and 4 faulty runs per cell
"""
from core.commands import PipelineCommand
from synthetic.services import synthesize


class Command(PipelineCommand):
    help = 'Generate synthetic healthy and faulty bearing recordings with a manifest'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            '--campaign-runs',
            action='store_true',
            help='Use the per-bearing run counts of the reference motor campaign'
        )

    def run(self, config, **options):
        manifest, path = synthesize(config, campaign_runs=options['campaign_runs'])

        held_out = int(manifest['held_out'].sum())
        self.stdout.write(
            f"{len(manifest)} recordings from {manifest['bearing_id'].nunique()} bearings, "
            f"{held_out} at held-out conditions"
        )
        self.stdout.write(self.style.SUCCESS(f"Wrote {path}"))
