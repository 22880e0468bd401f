"""
DRF serializers for the command-line front end.
Input serializers validate flag values; output serializers shape the
records written to JSON files.
"""
from rest_framework import serializers

from .channels import ChannelKind
from .trajectories import SEED_MASK

COIN_INIT_CHOICES = ["plus", "minus", "symmetric"]
CHANNEL_CHOICES = [kind.value for kind in ChannelKind]
FORMAT_CHOICES = ["csv", "json"]
ENGINE_CHOICES = ["master", "trajectory"]
ANALYSIS_MODES = ["slope", "coefficient", "finite-t"]


class SignificantFloatField(serializers.FloatField):
    """Float rounded to 9 significant digits, matching the CSV files."""

    def to_representation(self, value):
        return float(format(float(value) + 0.0, ".9g"))


# =====================================================
# INPUTS
# =====================================================

class WalkOptionsSerializer(serializers.Serializer):
    """Flags of `walk`."""

    T = serializers.IntegerField(min_value=0, help_text="Number of steps")
    coin_init = serializers.ChoiceField(choices=COIN_INIT_CHOICES)
    out = serializers.CharField(help_text="Output directory")
    format = serializers.ChoiceField(choices=FORMAT_CHOICES, default="csv")


class MasterOptionsSerializer(WalkOptionsSerializer):
    """Flags of `master`."""

    p = serializers.FloatField(min_value=0.0, max_value=1.0, help_text="Decoherence probability per step")
    channel = serializers.ChoiceField(choices=CHANNEL_CHOICES, default=ChannelKind.BOTH.value)


class TrajectoryOptionsSerializer(MasterOptionsSerializer):
    """Flags of `traj`."""

    runs = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MASK)
    jobs = serializers.IntegerField(min_value=1, default=1)


class SweepSpecSerializer(serializers.Serializer):
    """Flags of `sweep`: explicit lists, a log/linear p grid, or the crossover preset."""

    T = serializers.ListField(child=serializers.IntegerField(min_value=0), allow_empty=False)
    p = serializers.ListField(
        child=serializers.FloatField(min_value=0.0, max_value=1.0),
        allow_empty=False,
    )
    channel = serializers.ListField(child=serializers.ChoiceField(choices=CHANNEL_CHOICES), allow_empty=False)
    coin_init = serializers.ChoiceField(choices=COIN_INIT_CHOICES)
    engine = serializers.ChoiceField(choices=ENGINE_CHOICES, default="master")
    runs = serializers.IntegerField(min_value=1, default=10_000)
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MASK, default=0)
    jobs = serializers.IntegerField(min_value=1, default=1)
    out = serializers.CharField()
    format = serializers.ChoiceField(choices=FORMAT_CHOICES, default="csv")


class AnalyzeOptionsSerializer(serializers.Serializer):
    """Flags of `analyze`."""

    mode = serializers.ChoiceField(choices=ANALYSIS_MODES)
    T = serializers.ListField(child=serializers.IntegerField(min_value=1), allow_empty=False)
    channel = serializers.ChoiceField(choices=CHANNEL_CHOICES, default=ChannelKind.BOTH.value)
    p_grid = serializers.ListField(child=serializers.FloatField(min_value=0.0, max_value=1.0), required=False)
    p_fractions = serializers.ListField(child=serializers.FloatField(min_value=0.0), required=False)
    coin_init = serializers.ChoiceField(choices=COIN_INIT_CHOICES)
    self_test = serializers.BooleanField(default=False)
    jobs = serializers.IntegerField(min_value=1, default=1)
    out = serializers.CharField()

    def validate(self, data):
        """Single-T modes take exactly one T."""
        if data["mode"] == "slope" and len(data["T"]) != 1:
            raise serializers.ValidationError("Slope analysis takes exactly one T value")
        if data["self_test"] and data["mode"] != "coefficient":
            raise serializers.ValidationError("--self-test applies to the coefficient analysis only")
        return data


# =====================================================
# OUTPUTS
# =====================================================

class MomentsRecordSerializer(serializers.Serializer):
    channel = serializers.CharField()
    T = serializers.IntegerField()
    p = SignificantFloatField()
    mean = SignificantFloatField()
    second_moment = SignificantFloatField()
    sigma = SignificantFloatField()


class DistributionRowSerializer(serializers.Serializer):
    t = serializers.IntegerField()
    x = serializers.IntegerField()
    a = serializers.IntegerField()
    prob = SignificantFloatField()
    stderr = SignificantFloatField(required=False)


class SlopeEstimateSerializer(serializers.Serializer):
    T = serializers.IntegerField()
    channel = serializers.CharField()
    scaled_slope = SignificantFloatField()
    p_grid = serializers.ListField(child=SignificantFloatField())
    sigmas = serializers.ListField(child=SignificantFloatField())
    method = serializers.CharField()


class BracketFitSerializer(serializers.Serializer):
    c1 = SignificantFloatField()
    c2 = SignificantFloatField()
    c3 = SignificantFloatField()
    n_samples = serializers.IntegerField()
