"""
Shared base for the pipeline management commands.
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import HarmspaceError
from core.models import ChannelSet, Method
from core.run_config import load_run_config

logger = logging.getLogger(__name__)


class PipelineCommand(BaseCommand):
    """
    Adds the common flags and turns pipeline errors into exit codes.

    Subclasses implement ``run(config, **options)``.
    """

    def add_arguments(self, parser):
        parser.add_argument(
            '--config',
            dest='config_path',
            help='KEY=VALUE run config file (overrides settings defaults)'
        )
        parser.add_argument(
            '--method',
            choices=Method.values,
            help='Feature method (default from config)'
        )
        parser.add_argument(
            '--channels',
            choices=ChannelSet.values,
            help='Accelerometer channel set (default from config)'
        )
        parser.add_argument(
            '--seed',
            type=int,
            help='Master seed (default from config)'
        )
        parser.add_argument(
            '--out',
            help='Output directory (default from config)'
        )
        parser.add_argument(
            '--data',
            help='Dataset directory holding manifest.csv (default from config)'
        )
        parser.add_argument(
            '--allow-mixed-training',
            action='store_true',
            help='Allow faulty rows in the adjustment training set'
        )

    def load_config(self, options):
        return load_run_config(options.get('config_path'), {
            'method': options.get('method'),
            'channel_set': options.get('channels'),
            'seed': options.get('seed'),
            'paths_out_dir': options.get('out'),
            'paths_data_dir': options.get('data'),
        })

    def handle(self, *args, **options):
        try:
            config = self.load_config(options)
            return self.run(config, **options)
        except HarmspaceError as e:
            logger.debug("Pipeline command failed", exc_info=True)
            raise CommandError(str(e), returncode=e.exit_code)

    def run(self, config, **options):
        raise NotImplementedError
