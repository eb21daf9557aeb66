from pipeline.runner import PipelineResult, build_nonlinearity, run_pipeline, run_sweep, sweep_workers

__all__ = ['PipelineResult', 'build_nonlinearity', 'run_pipeline', 'run_sweep', 'sweep_workers']
