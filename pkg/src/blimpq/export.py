import csv
import json
import os

from .structs import Flags, Record, TrajectoryLog

FORMATS = ("csv", "struct")

COLUMNS = (
    ["t", "p_x", "p_y", "p_z", "phi", "theta", "psi"]
    + ["v_x", "v_y", "v_z", "omega_x", "omega_y", "omega_z"]
    + ["delta_x", "delta_y", "F"]
    + ["f_x", "f_y", "f_z", "tau_x", "tau_y", "tau_z"]
    + ["lyapunov", "charge_mah", "energy_mwh"]
)

FLAG_COLUMNS = list(Flags._fields)


class ExportException(Exception):
    """A base class for all exceptions raised by this module."""


class LogIOError(ExportException):
    def __init__(self, path, cause):
        super(LogIOError, self).__init__(path, cause)
        self.path = path
        self.cause = cause

    def __str__(self):
        return "Cannot access log {}: {}".format(self.path, self.cause)


def _format_for(path, format):
    if format is None:
        format = "csv" if str(path).endswith(".csv") else "struct"
    if format == "json":
        format = "struct"
    if format not in FORMATS:
        raise ValueError("unknown log format {!r}".format(format))
    return format


def _row(record):
    values = (
        [record.t]
        + list(record.p)
        + list(record.eta)
        + list(record.v)
        + list(record.omega)
        + list(record.q_arm)
        + [record.thrust]
        + list(record.wrench)
        + ["" if record.lyapunov is None else record.lyapunov]
        + [record.charge_mah, record.energy_mwh]
    )
    return values + [int(flag) for flag in record.flags]


def _record_from_row(row):
    if len(row) != len(COLUMNS) + len(FLAG_COLUMNS):
        raise ValueError(
            "expected {} columns, got {}".format(
                len(COLUMNS) + len(FLAG_COLUMNS), len(row)
            )
        )
    values = [None if v == "" else float(v) for v in row[: len(COLUMNS)]]
    flags = Flags(*(bool(int(v)) for v in row[len(COLUMNS) :]))
    return Record(
        t=values[0],
        p=tuple(values[1:4]),
        eta=tuple(values[4:7]),
        v=tuple(values[7:10]),
        omega=tuple(values[10:13]),
        q_arm=tuple(values[13:15]),
        thrust=values[15],
        wrench=tuple(values[16:22]),
        lyapunov=values[22],
        charge_mah=values[23],
        energy_mwh=values[24],
        flags=flags,
        eta_ref=None,
        thrust_load=None,
        arm_duty=None,
        motors=None,
    )


def _jsonable(record):
    data = record._asdict()
    data["flags"] = record.flags._asdict()
    return data


def _tupled(value):
    if isinstance(value, list):
        return tuple(_tupled(v) for v in value)
    return value


def _record_from_json(data):
    fields = {key: _tupled(value) for key, value in data.items()}
    fields["flags"] = Flags(**data["flags"])
    return Record(**fields)


def export_log(log, format, path):
    """Write ``log`` to ``path`` as ``"csv"`` or ``"struct"`` (JSON).

    The tabular format keeps a fixed column order and drops the fields in
    `structs.EXTRA_FIELDS`; the structured one keeps everything, header
    included.
    """
    format = _format_for(path, format)
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            if format == "csv":
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(COLUMNS + FLAG_COLUMNS)
                for record in log:
                    writer.writerow(_row(record))
            else:
                json.dump(
                    {
                        "header": log.header,
                        "records": [_jsonable(r) for r in log],
                    },
                    f,
                    sort_keys=True,
                    indent=1,
                )
                f.write("\n")
    except OSError as e:
        raise LogIOError(os.fspath(path), e)


def read_log(path, format=None):
    """Read a log written by `export_log()`.

    Tabular logs come back with an empty header and ``None`` for the fields
    the tabular format does not carry.
    """
    format = _format_for(path, format)
    try:
        with open(path, newline="", encoding="utf-8") as f:
            if format == "csv":
                reader = csv.reader(f)
                header = next(reader, None)
                if header != COLUMNS + FLAG_COLUMNS:
                    raise ValueError("unexpected header {!r}".format(header))
                return TrajectoryLog({}, [_record_from_row(r) for r in reader])
            data = json.load(f)
    except (OSError, ValueError) as e:
        raise LogIOError(os.fspath(path), e)
    try:
        records = [_record_from_json(r) for r in data["records"]]
        return TrajectoryLog(data["header"], records)
    except (KeyError, TypeError, ValueError) as e:
        raise LogIOError(os.fspath(path), e)
