from rest_framework import serializers

from ifs_core.serializers import RationalField


class SignificantFloatField(serializers.FloatField):
    """Floats rounded to 12 significant digits in reports."""

    def to_representation(self, value):
        if value is None:
            return None
        return float(f"{float(value):.12g}")


class ClassificationSerializer(serializers.Serializer):
    system_type = serializers.CharField()
    maps = serializers.ListField(child=serializers.CharField())
    block_type = serializers.BooleanField()


class RoscSerializer(serializers.Serializer):
    rect = serializers.SerializerMethodField()
    satisfied = serializers.BooleanField()
    witness = serializers.DictField(allow_null=True)

    def get_rect(self, obj):
        return [RationalField().to_representation(value) for value in obj.rect.as_tuple()]


class ProjectionsSerializer(serializers.Serializer):
    s1 = SignificantFloatField()
    s2 = SignificantFloatField()
    method = serializers.CharField()
    method_s1 = serializers.CharField(source='method_s1.value')
    method_s2 = serializers.CharField(source='method_s2.value')
    rigorous = serializers.BooleanField()
    clamped = serializers.BooleanField()
    symmetric_nodes = serializers.ListField(child=serializers.CharField())
    dedupe_log = serializers.ListField(child=serializers.CharField())
    notes = serializers.ListField(child=serializers.CharField())


class DimensionSerializer(serializers.Serializer):
    kind = serializers.CharField()
    schedule = serializers.ListField(child=serializers.IntegerField())
    roots = serializers.ListField(child=SignificantFloatField())
    final_upper = SignificantFloatField()
    extrapolated = SignificantFloatField()
    closed_form = SignificantFloatField(allow_null=True)
    method_flags = serializers.SerializerMethodField()
    notes = serializers.ListField(child=serializers.CharField())

    def get_method_flags(self, obj):
        flags = {'extrapolation': 'heuristic', 'decreasing': obj.is_decreasing}
        flags.update(obj.flags)
        flags.update(self.context.get('flags', {}))
        return flags


class GapSerializer(serializers.Serializer):
    level = serializers.IntegerField()
    affinity_upper = SignificantFloatField()
    epsilon = SignificantFloatField()
    eta = SignificantFloatField(allow_null=True)
    bound = SignificantFloatField(allow_null=True)
    gap_detected = serializers.BooleanField()
    notes = serializers.ListField(child=serializers.CharField())
