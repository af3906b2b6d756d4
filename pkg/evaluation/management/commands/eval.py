"""
Management command to run the evaluation protocol on feature stores.

Usage:
    python manage.py eval                              # Method and channels from config
    python manage.py eval --method FFT --channels A1+A2
    python manage.py eval --all                        # Every store extract --all produced
"""
from core.commands import PipelineCommand
from core.models import CHANNEL_SET_ORDER, METHOD_ORDER
from evaluation.services import EvaluationService


class Command(PipelineCommand):
    help = 'Evaluate accuracy and operating condition ID error on held-out conditions'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            '--all',
            action='store_true',
            help='Evaluate all four methods for all three channel sets'
        )

    def run(self, config, **options):
        if options['all']:
            combos = [(m, c) for m in METHOD_ORDER for c in CHANNEL_SET_ORDER]
        else:
            combos = [(config.method, config.channel_set)]

        for method, channel_set in combos:
            service = EvaluationService(
                config.with_method(method, channel_set),
                allow_mixed_training=options['allow_mixed_training'],
            )
            report = service.run()
            self.stdout.write(
                f"{method} {channel_set}: accuracy {100 * report.accuracy:.1f}%, "
                f"ID error {100 * report.ocid_error:.1f}% over {len(report.cells)} cells"
            )
            self.stdout.write(self.style.SUCCESS(f"Wrote {service.run_dir}"))
