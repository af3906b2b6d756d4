from django.db import models


class Method(models.TextChoices):
    FFT = 'FFT', 'Frequency analysis'
    HFFT = 'HFFT', 'Envelope analysis'
    HAR = 'HAR', 'Harmonics'
    HARH = 'HARH', 'Hilbert harmonics'

    @property
    def is_harmonic(self):
        return self in (Method.HAR, Method.HARH)

    @property
    def uses_hilbert(self):
        return self in (Method.HFFT, Method.HARH)


class ChannelSet(models.TextChoices):
    A1 = 'A1', 'Accelerometer 1 (chassis)'
    A2 = 'A2', 'Accelerometer 2 (test bench)'
    A1_A2 = 'A1+A2', 'Both accelerometers'

    @property
    def channel_indices(self):
        """Zero-based channel indices inside a recording file."""
        return {
            ChannelSet.A1: (0,),
            ChannelSet.A2: (1,),
            ChannelSet.A1_A2: (0, 1),
        }[self]

    @property
    def file_slug(self):
        return self.value.replace('+', '-')


class HealthClass(models.TextChoices):
    HEALTHY = 'healthy', 'Healthy'
    FAULTY = 'faulty', 'Faulty'


class Reweighting(models.TextChoices):
    INVERSE_CLASS_FREQUENCY = 'inverse_class_frequency', 'Inverse class frequency'
    NONE = 'none', 'Unweighted'


class SpectrumKind(models.TextChoices):
    MAGNITUDE = 'magnitude', 'Magnitude spectrum'
    POWER = 'power', 'Squared magnitude spectrum'


# Table column order used by every report
METHOD_ORDER = [Method.FFT, Method.HFFT, Method.HAR, Method.HARH]
CHANNEL_SET_ORDER = [ChannelSet.A1, ChannelSet.A2, ChannelSet.A1_A2]
