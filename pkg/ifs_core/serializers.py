from rest_framework import serializers

from .models import AffineMapSpec, BoxLikeIFS, DihedralElement, InvalidMapError, Rect
from .utils import format_rational, from_target_rect, image_rect, parse_rational

ISO_CHOICES = [(element.value, element.name.lower()) for element in DihedralElement]


class RationalField(serializers.Field):
    """Exact rational written as "p/q", a decimal string, or a number."""

    default_error_messages = {
        'invalid': 'Expected a rational such as "3/5", a decimal or an integer.',
    }

    def to_internal_value(self, data):
        try:
            return parse_rational(data)
        except (ValueError, ZeroDivisionError, TypeError):
            self.fail('invalid')

    def to_representation(self, value):
        return format_rational(value)


class MapEntrySerializer(serializers.Serializer):
    """One ``[[map]]`` table: either ``iso`` + ``rect`` or ``a``, ``b``, ``iso``, ``t``."""

    iso = serializers.ChoiceField(choices=ISO_CHOICES, default=DihedralElement.ID.value)
    rect = serializers.ListField(child=RationalField(), min_length=4, max_length=4, required=False)
    a = RationalField(required=False)
    b = RationalField(required=False)
    t = serializers.ListField(child=RationalField(), min_length=2, max_length=2, required=False)

    def validate(self, attrs):
        raw_keys = [key for key in ('a', 'b', 't') if key in attrs]
        if 'rect' in attrs and raw_keys:
            raise serializers.ValidationError("Give either rect or a, b and t, not both.")
        if 'rect' not in attrs and len(raw_keys) != 3:
            missing = [key for key in ('a', 'b', 't') if key not in attrs]
            raise serializers.ValidationError({key: "This field is required." for key in missing})

        try:
            if 'rect' in attrs:
                x0, x1, y0, y1 = attrs['rect']
                if x0 >= x1 or y0 >= y1:
                    raise serializers.ValidationError({'rect': "Expected [x0, x1, y0, y1] with x0 < x1 and y0 < y1."})
                attrs['spec'] = from_target_rect(attrs['iso'], Rect(x0, x1, y0, y1))
            else:
                attrs['spec'] = AffineMapSpec(a=attrs['a'], b=attrs['b'], iso=attrs['iso'], t=tuple(attrs['t']))
        except InvalidMapError as exc:
            raise serializers.ValidationError(str(exc))
        return attrs


class IFSConfigSerializer(serializers.Serializer):
    name = serializers.CharField(required=False, allow_blank=True, default='')
    map = MapEntrySerializer(many=True)

    def validate_map(self, value):
        if len(value) < 2:
            raise serializers.ValidationError("An IFS needs at least two maps.")
        return value

    def create(self, validated_data):
        return BoxLikeIFS(
            tuple(entry['spec'] for entry in validated_data['map']),
            name=validated_data.get('name', ''),
        )


class CanonicalMapSerializer(serializers.Serializer):
    a = RationalField()
    b = RationalField()
    iso = serializers.SerializerMethodField()
    t = serializers.ListField(child=RationalField())
    image = serializers.SerializerMethodField()

    def get_iso(self, obj):
        return obj.iso.value

    def get_image(self, obj):
        return [format_rational(value) for value in image_rect(obj).as_tuple()]


class CanonicalIFSSerializer(serializers.Serializer):
    """Echo of an IFS that re-parses through ``IFSConfigSerializer`` unchanged."""

    name = serializers.CharField()
    map = CanonicalMapSerializer(source='maps', many=True)


def flatten_errors(detail, prefix=''):
    """Turn nested DRF error details into ``(field_path, message)`` pairs."""
    if isinstance(detail, dict):
        for key, value in detail.items():
            if key == 'non_field_errors':
                yield from flatten_errors(value, prefix)
            elif isinstance(key, int):
                # newer DRF reports list-serializer errors keyed by index
                yield from flatten_errors(value, f"{prefix}[{key}]")
            else:
                yield from flatten_errors(value, f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(detail, list):
        if all(isinstance(item, (str, serializers.ErrorDetail)) for item in detail):
            for item in detail:
                yield prefix, str(item)
        else:
            for index, item in enumerate(detail):
                if item:
                    yield from flatten_errors(item, f"{prefix}[{index}]")
    else:
        yield prefix, str(detail)
