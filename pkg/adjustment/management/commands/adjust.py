"""
Management command to train and apply the operating condition adjustment.

Usage:
    python manage.py adjust                               # Fit on healthy rows, adjust all
    python manage.py adjust --exclude-bearing AM-02       # Leave a test bearing out
    python manage.py adjust --model runs/x/features/models/HARH_A1-A2.adj
    python manage.py adjust --allow-mixed-training        # Let faulty rows into the fit
"""
from adjustment.services import AdjustmentRun
from core.commands import PipelineCommand


class Command(PipelineCommand):
    help = 'Fit the speed/load adjustment on healthy training rows and apply it to a feature store'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            '--exclude-bearing',
            action='append',
            default=[],
            help='Bearing ID to keep out of training (repeatable)'
        )
        parser.add_argument(
            '--model',
            help='Apply a saved model instead of fitting a new one'
        )

    def run(self, config, **options):
        job = AdjustmentRun(
            config,
            allow_mixed_training=options['allow_mixed_training'],
            exclude_bearings=options['exclude_bearing'],
        )
        model, adjusted = job.run(model_path=options.get('model'))

        if not model.healthy_only:
            self.stdout.write(self.style.WARNING('Model was trained on mixed healthy/faulty rows'))
        if not options.get('model'):
            self.stdout.write(self.style.SUCCESS(f"Wrote model {job.model_path}"))
        self.stdout.write(f"Adjusted {adjusted.n_rows} rows x {adjusted.n_features} features")
        self.stdout.write(self.style.SUCCESS(f"Wrote {job.adjusted_path}"))
