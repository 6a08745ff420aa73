import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings.testing')
django.setup()
