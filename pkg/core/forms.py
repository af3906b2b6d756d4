"""
Run configuration validation.

Config values arrive as strings from a KEY=VALUE file, from environment
backed settings or from command-line flags; the form turns them into
typed values and checks the rules that span several keys.
"""
from django import forms
from django.core.exceptions import ValidationError

from core.models import ChannelSet, Method, Reweighting, SpectrumKind
from core.signal_utils import MIN_WINDOW, window_size


class FloatListField(forms.CharField):
    """Comma separated numbers, e.g. ``1000,2000,3000``."""

    def to_python(self, value):
        if isinstance(value, (list, tuple)):
            return tuple(float(v) for v in value)
        value = super().to_python(value)
        if not value:
            return ()
        try:
            return tuple(float(part) for part in value.split(',') if part.strip())
        except ValueError:
            raise ValidationError(f"Expected comma separated numbers, got '{value}'")


class ConditionListField(forms.CharField):
    """Comma separated ``rpm:nm`` pairs, e.g. ``2000:5,3000:5``."""

    def to_python(self, value):
        if isinstance(value, (list, tuple)):
            return tuple((float(s), float(t)) for s, t in value)
        value = super().to_python(value)
        if not value:
            return ()
        conditions = []
        for part in value.split(','):
            part = part.strip()
            if not part:
                continue
            speed, sep, load = part.partition(':')
            if not sep:
                raise ValidationError(f"Condition '{part}' must look like RPM:NM")
            try:
                conditions.append((float(speed), float(load)))
            except ValueError:
                raise ValidationError(f"Condition '{part}' is not numeric")
        return tuple(conditions)

    def validate(self, value):
        super().validate(value)
        for speed, _ in value:
            if speed <= 0:
                raise ValidationError(f"Condition speed must be positive, got {speed:g} RPM")


class RunConfigForm(forms.Form):
    method = forms.ChoiceField(choices=Method.choices)
    channel_set = forms.ChoiceField(choices=ChannelSet.choices)
    seed = forms.IntegerField(min_value=0)

    harmonic_d = forms.IntegerField(min_value=1)
    harmonic_fo_max = forms.FloatField(min_value=0.001)
    harmonic_max_harmonics = forms.IntegerField(min_value=1)
    harmonic_db_floor = forms.FloatField(min_value=1e-300)
    harmonic_spectrum = forms.ChoiceField(choices=SpectrumKind.choices)

    baseline_window = forms.IntegerField(min_value=MIN_WINDOW)
    baseline_lowpass_hz = forms.FloatField(min_value=0.001)

    preprocess_cutoff_hz = forms.FloatField(min_value=0.001)
    preprocess_order = forms.IntegerField(min_value=1, max_value=12)

    eval_pca_components = forms.IntegerField(min_value=1)
    eval_test_conditions = ConditionListField()
    eval_reweighting = forms.ChoiceField(choices=Reweighting.choices)

    synth_fs = forms.FloatField(min_value=1.0)
    synth_duration_s = forms.FloatField(min_value=0.001)
    synth_channels = forms.IntegerField(min_value=1, max_value=2)
    synth_speeds_rpm = FloatListField()
    synth_loads_nm = FloatListField()
    synth_cells = ConditionListField(required=False)
    synth_runs = forms.IntegerField(min_value=1)
    synth_snr_db = forms.FloatField()

    paths_data_dir = forms.CharField()
    paths_out_dir = forms.CharField()
    workers = forms.IntegerField(min_value=1)

    def clean(self):
        cleaned = super().clean()
        if self.errors:
            return cleaned

        nyquist = cleaned['synth_fs'] / 2
        if cleaned['preprocess_cutoff_hz'] >= nyquist:
            self.add_error(
                'preprocess_cutoff_hz',
                f"Cutoff must be below Nyquist ({nyquist:g} Hz)",
            )
        if cleaned['baseline_lowpass_hz'] >= nyquist:
            self.add_error(
                'baseline_lowpass_hz',
                f"Baseline low-pass must be below Nyquist ({nyquist:g} Hz)",
            )

        d = cleaned['harmonic_d']
        try:
            n_min = window_size(cleaned['synth_fs'], cleaned['harmonic_fo_max'], d)
        except ValueError as e:
            self.add_error('harmonic_fo_max', str(e))
        else:
            if cleaned['harmonic_max_harmonics'] * d > n_min // 2 - 1:
                self.add_error(
                    'harmonic_max_harmonics',
                    f"{cleaned['harmonic_max_harmonics']} harmonics at d={d} do not fit "
                    f"in {n_min // 2 - 1} columns at fo_max={cleaned['harmonic_fo_max']:g} Hz",
                )

        if any(s / 60.0 > cleaned['harmonic_fo_max'] for s in cleaned['synth_speeds_rpm']):
            self.add_error('synth_speeds_rpm', "Grid speeds exceed fo_max")

        grid = set(cleaned['synth_cells']) or {
            (s, t) for s in cleaned['synth_speeds_rpm'] for t in cleaned['synth_loads_nm']
        }
        outside = [c for c in cleaned['eval_test_conditions'] if c not in grid]
        if outside:
            listed = ', '.join(f"{s:g}:{t:g}" for s, t in outside)
            self.add_error('eval_test_conditions', f"Held-out conditions outside the grid: {listed}")

        return cleaned
