"""
Management command to compare finished evaluation runs.

Usage:
    python manage.py report runs/demo/HARH_A1-A2 runs/demo/FFT_A1-A2
    python manage.py report runs/demo/*_* --out runs/demo --pdf
"""
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import HarmspaceError
from evaluation.reports import Comparison, load_summary


class Command(BaseCommand):
    help = 'Build the methods x channel-set comparison from one or more eval run directories'

    def add_arguments(self, parser):
        parser.add_argument(
            'run_dirs',
            nargs='+',
            help='Directories written by eval'
        )
        parser.add_argument(
            '--out',
            help='Where to write the comparison (default: parent of the first run)'
        )
        parser.add_argument(
            '--pdf',
            action='store_true',
            help='Also render comparison.pdf'
        )

    def handle(self, *args, **options):
        run_dirs = [Path(d) for d in options['run_dirs']]
        out_dir = Path(options['out']) if options.get('out') else run_dirs[0].parent

        try:
            comparison = Comparison([load_summary(d) for d in run_dirs])
            written = comparison.write(out_dir, pdf=options['pdf'])
        except HarmspaceError as e:
            raise CommandError(str(e), returncode=e.exit_code)

        if comparison.mixed_seeds:
            self.stdout.write(self.style.WARNING(comparison.banner()))
        for path in written:
            self.stdout.write(self.style.SUCCESS(f"Wrote {path}"))
