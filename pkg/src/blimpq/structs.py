import collections

import numpy as np

Flags = collections.namedtuple(
    "Flags",
    "saturated validity stagnant claw_closed perched",
)

NO_FLAGS = Flags(False, False, False, False, False)

Record = collections.namedtuple(
    "Record",
    [
        "t",
        "p",
        "eta",
        "v",
        "omega",
        "q_arm",
        "thrust",
        "wrench",
        "lyapunov",
        "charge_mah",
        "energy_mwh",
        "flags",
        "eta_ref",
        "thrust_load",
        "arm_duty",
        "motors",
    ],
)

# Fields a tabular export does not carry.
EXTRA_FIELDS = ("eta_ref", "thrust_load", "arm_duty", "motors")

_VECTOR_FIELDS = ("p", "eta", "v", "omega", "q_arm", "wrench")


def make_record(t, state, thrust, wrench, **kwargs):
    """Freeze a sample into plain floats and tuples."""
    fields = {
        "t": float(t),
        "p": state.p,
        "eta": state.eta,
        "v": state.v,
        "omega": state.omega,
        "q_arm": state.q_arm,
        "thrust": float(thrust),
        "wrench": wrench,
        "lyapunov": None,
        "charge_mah": 0.0,
        "energy_mwh": 0.0,
        "flags": NO_FLAGS,
        "eta_ref": None,
        "thrust_load": 0.0,
        "arm_duty": 0.0,
        "motors": (0.0, 0.0),
    }
    fields.update(kwargs)
    for name in _VECTOR_FIELDS:
        fields[name] = tuple(float(x) for x in fields[name])
    if fields["lyapunov"] is not None:
        fields["lyapunov"] = float(fields["lyapunov"])
    if fields["eta_ref"] is not None:
        fields["eta_ref"] = tuple(
            None if x is None else float(x) for x in fields["eta_ref"]
        )
    fields["motors"] = tuple(float(x) for x in fields["motors"])
    return Record(**fields)


class TrajectoryLog(object):
    """Uniformly sampled records of one simulated flight.

    ``header`` carries the scenario name, step, decimation, seed and mode
    so an exported log describes itself.
    """

    def __init__(self, header, records=()):
        self.header = dict(header)
        self._records = []
        for record in records:
            self.append(record)

    def __repr__(self):
        return "<TrajectoryLog {!r} with {} records>".format(
            self.header.get("name"),
            len(self._records),
        )

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def __eq__(self, other):
        if not isinstance(other, TrajectoryLog):
            return NotImplemented
        return (self.header, self._records) == (other.header, other._records)

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    @property
    def records(self):
        return self._records

    @property
    def sample_interval(self):
        return self.header["dt"] * self.header["decimation"]

    def append(self, record):
        if self._records and not record.t > self._records[-1].t:
            raise ValueError(
                "timestamps must increase, got {!r} after {!r}".format(
                    record.t,
                    self._records[-1].t,
                )
            )
        self._records.append(record)

    def column(self, name, index=None):
        """All values of one field as an array, optionally one component."""
        values = [getattr(r, name) for r in self._records]
        if index is not None:
            values = [v[index] for v in values]
        return np.array(values, dtype=float)

    def times(self):
        return self.column("t")
