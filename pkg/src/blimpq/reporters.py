import logging
import math

logger = logging.getLogger("blimpq")


class BaseReporter(object):
    """Delegate class to provide progress reporting for the simulator."""

    def starting(self, config):
        """Called before the first integration step."""

    def sampling(self, index, record):
        """Called for every record that enters the log.

        The index is zero-based and counts logged samples, not steps.
        """

    def saturating(self, t, q_arm):
        """Called when the arm is clamped onto its workspace boundary."""

    def leaving_envelope(self, t, alpha, beta):
        """Called when the flow angles leave the identified envelope.

        Only the transition is reported, not every step outside.
        """

    def toggling_claw(self, t, closed):
        """Called when the scripted claw opens or closes."""

    def perching(self, t):
        """Called when a closed claw ends the flight."""

    def ending(self, log):
        """Called after the last sample has been logged."""


class LoggingReporter(BaseReporter):
    """Forward simulation progress to the ``blimpq`` logger."""

    def __init__(self, log=logger):
        self.log = log

    def starting(self, config):
        self.log.info(
            "simulating %s for %.3g s at dt=%.3g s (%s)",
            config.name,
            config.duration,
            config.dt,
            config.mode,
        )

    def sampling(self, index, record):
        self.log.debug(
            "t=%.3f p=(%.3f, %.3f, %.3f) eta=(%.2f, %.2f, %.2f) deg",
            record.t,
            record.p[0],
            record.p[1],
            record.p[2],
            *(math.degrees(a) for a in record.eta)
        )

    def saturating(self, t, q_arm):
        self.log.debug("t=%.3f arm saturated at %r", t, q_arm)

    def leaving_envelope(self, t, alpha, beta):
        self.log.warning(
            "t=%.3f flow angles alpha=%.1f deg beta=%.1f deg "
            "outside the identified envelope",
            t,
            math.degrees(alpha),
            math.degrees(beta),
        )

    def toggling_claw(self, t, closed):
        self.log.info("t=%.3f claw %s", t, "closed" if closed else "open")

    def perching(self, t):
        self.log.info("t=%.3f perched", t)

    def ending(self, log):
        self.log.info("finished with %d records", len(log))
