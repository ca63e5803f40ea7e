"""
Validation of the JSON documents the engine reads and of the run configuration.

Every document crossing a file boundary (library docs, pipeline metadata,
pipeline IRs, column profiles) is checked here before it reaches the engine;
a document that fails validation is skipped by the corpus drivers.
"""
from rest_framework import serializers

from .profiler import EMBEDDING_DIM, FINE_GRAINED_TYPES


class LibraryParameterSerializer(serializers.Serializer):
    name = serializers.CharField()
    default = serializers.CharField(required=False, allow_null=True, allow_blank=True, trim_whitespace=False)
    type = serializers.CharField(required=False, allow_null=True, allow_blank=True)


class LibraryEntrySerializer(serializers.Serializer):
    path = serializers.RegexField(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*$")
    params = LibraryParameterSerializer(many=True, required=False, default=list)
    returns = serializers.CharField(required=False, allow_null=True, allow_blank=False)

    def validate_params(self, value):
        names = [param["name"] for param in value]
        if len(names) != len(set(names)):
            raise serializers.ValidationError("parameter names must be unique")
        return value


class PipelineMetadataSerializer(serializers.Serializer):
    pipeline_id = serializers.CharField()
    source = serializers.CharField()
    dataset_name = serializers.CharField()
    author = serializers.CharField(required=False, allow_blank=True, default="")
    score = serializers.FloatField(required=False, default=0.0)
    tags = serializers.ListField(child=serializers.CharField(), required=False, default=list)
    url = serializers.CharField(required=False, allow_null=True, allow_blank=True, default=None)


class StatementSerializer(serializers.Serializer):
    index = serializers.IntegerField(min_value=0)
    line = serializers.IntegerField(min_value=0)
    text = serializers.CharField(allow_blank=True, trim_whitespace=False)
    control_flow = serializers.ListField(
        child=serializers.ChoiceField(choices=["loop", "conditional", "import", "user_function"]),
        required=False, default=list,
    )
    call = serializers.CharField(required=False, allow_null=True, default=None)
    parameters = serializers.ListField(
        child=serializers.ListField(child=serializers.CharField(allow_blank=True, trim_whitespace=False),
                                    min_length=2, max_length=2),
        required=False, default=list,
    )
    return_type = serializers.CharField(required=False, allow_null=True, default=None)
    detected_table_reads = serializers.ListField(child=serializers.CharField(), required=False, default=list)
    detected_column_reads = serializers.ListField(child=serializers.CharField(), required=False, default=list)


class PipelineGraphIRSerializer(serializers.Serializer):
    metadata = PipelineMetadataSerializer()
    statements = StatementSerializer(many=True)
    data_flow_edges = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=2, max_length=2),
        required=False, default=list,
    )

    def validate(self, attrs):
        indices = [statement["index"] for statement in attrs["statements"]]
        if indices != list(range(len(indices))):
            raise serializers.ValidationError("statement indices must be dense and ordered")
        for source, target in attrs["data_flow_edges"]:
            if not source < target < len(indices):
                raise serializers.ValidationError(f"data-flow edge {source}->{target} is not forward")
        return attrs


class ColumnMetadataSerializer(serializers.Serializer):
    source = serializers.CharField()
    dataset = serializers.CharField()
    table = serializers.CharField()
    column = serializers.CharField()
    column_uri = serializers.URLField()


class ColumnStatsSerializer(serializers.Serializer):
    total_count = serializers.IntegerField(min_value=0)
    distinct_count = serializers.IntegerField(min_value=0)
    missing_count = serializers.IntegerField(min_value=0)
    min_value = serializers.FloatField(required=False, allow_null=True, default=None)
    max_value = serializers.FloatField(required=False, allow_null=True, default=None)
    mean_value = serializers.FloatField(required=False, allow_null=True, default=None)
    true_ratio = serializers.FloatField(required=False, allow_null=True, default=None, min_value=0.0, max_value=1.0)
    min_length = serializers.IntegerField(required=False, allow_null=True, default=None)
    max_length = serializers.IntegerField(required=False, allow_null=True, default=None)
    mean_length = serializers.FloatField(required=False, allow_null=True, default=None)

    def validate(self, attrs):
        if attrs["distinct_count"] > attrs["total_count"] - attrs["missing_count"]:
            raise serializers.ValidationError("distinct_count exceeds the non-missing count")
        return attrs


class ColumnProfileSerializer(serializers.Serializer):
    metadata = ColumnMetadataSerializer()
    fgt = serializers.ChoiceField(choices=list(FINE_GRAINED_TYPES))
    stats = ColumnStatsSerializer()
    embedding = serializers.ListField(
        child=serializers.FloatField(), min_length=EMBEDDING_DIM, max_length=EMBEDDING_DIM,
    )

    def validate(self, attrs):
        if (attrs["fgt"] == "boolean") != (attrs["stats"].get("true_ratio") is not None):
            raise serializers.ValidationError("true_ratio is present exactly for boolean columns")
        return attrs


class ThresholdSerializer(serializers.Serializer):
    alpha = serializers.FloatField(min_value=0.0, max_value=1.0)
    beta = serializers.FloatField(min_value=0.0, max_value=1.0)
    theta = serializers.FloatField(min_value=0.0, max_value=1.0)
    gamma = serializers.FloatField(min_value=0.0, max_value=1.0)


class ForgeConfigSerializer(serializers.Serializer):
    data_dir = serializers.CharField()
    pipelines_dir = serializers.CharField()
    docs_dir = serializers.CharField()
    out_dir = serializers.CharField()
    workers = serializers.IntegerField(min_value=1)
    lexicon_path = serializers.CharField()
    gazetteer_path = serializers.CharField()
    seed = serializers.IntegerField(min_value=0)
    thresholds = ThresholdSerializer()
