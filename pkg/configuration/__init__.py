from configuration.pipeline_configuration import PipelineConfiguration, ConfigurationError
