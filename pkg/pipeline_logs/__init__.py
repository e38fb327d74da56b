from pipeline_logs.run_log import RunLog
