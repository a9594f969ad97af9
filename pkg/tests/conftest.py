import pytest

from blimpq import BaseReporter
from blimpq.aero import default_aero_model
from blimpq.continuum import make_arm_spec
from blimpq.dynamics import make_vehicle_params, neutral_buoyancy


class TestReporter(BaseReporter):
    def __init__(self):
        self.events = []

    def starting(self, config):
        self.events.append(("starting", config.name))

    def sampling(self, index, record):
        self.events.append(("sampling", index, record.t))

    def saturating(self, t, q_arm):
        self.events.append(("saturating", t))

    def leaving_envelope(self, t, alpha, beta):
        self.events.append(("leaving_envelope", t))

    def toggling_claw(self, t, closed):
        self.events.append(("toggling_claw", t, closed))

    def perching(self, t):
        self.events.append(("perching", t))

    def ending(self, log):
        self.events.append(("ending", len(log)))

    def names(self):
        return [event[0] for event in self.events]


@pytest.fixture(scope="session")
def reporter_cls():
    return TestReporter


@pytest.fixture()
def reporter(reporter_cls):
    return reporter_cls()


@pytest.fixture(scope="session")
def arm():
    return make_arm_spec()


@pytest.fixture(scope="session")
def params(arm):
    return make_vehicle_params(arm)


@pytest.fixture(scope="session")
def neutral_params(params):
    return neutral_buoyancy(params)


@pytest.fixture(scope="session")
def aero_params(arm):
    return make_vehicle_params(arm, aero=default_aero_model(lateral_bias=0.0))
