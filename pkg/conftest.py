import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'harmspace.settings')
django.setup()
