import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'box_dimension.settings')
django.setup()
