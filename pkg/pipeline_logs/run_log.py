from datetime import datetime, timezone

from core_data_modules.logging import Logger

log = Logger(__name__)


class RunLog(object):
    def __init__(self, pipeline_name, run_id):
        """
        Records the stages a pipeline run passes through, for echoing into the run's output files.

        :param pipeline_name: Name of the pipeline, e.g. "train".
        :type pipeline_name: str
        :param run_id: Identifier of this pipeline run.
        :type run_id: str
        """
        self.pipeline_name = pipeline_name
        self.run_id = run_id
        self.events = []

    def log_event(self, event_name, event_timestamp=None):
        """
        :param event_name: Name of the stage the run has reached.
        :type event_name: str
        :param event_timestamp: ISO 8601 time of the event. Defaults to now, in UTC.
        :type event_timestamp: str | None
        """
        if event_timestamp is None:
            event_timestamp = datetime.now(timezone.utc).isoformat()

        log.info(f"Pipeline '{self.pipeline_name}' run {self.run_id}: {event_name}")
        self.events.append({
            "timestamp": event_timestamp,
            "event": event_name
        })

    def to_dict(self):
        return {
            "pipeline_name": self.pipeline_name,
            "run_id": self.run_id,
            "events": list(self.events)
        }
