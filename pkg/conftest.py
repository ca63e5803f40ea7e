"""Configure Django for pytest (equivalent to running via ``manage.py test``)."""
import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "lidsforge.settings")
django.setup()
