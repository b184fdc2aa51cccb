import logging
import math
from datetime import datetime
from typing import Any, Dict, Optional

import mlflow

logger = logging.getLogger(__name__)


class MLflowManager:
    """MLflow manager for tracking denoise and evaluation runs"""

    def __init__(self, tracking_uri: str = "mlruns", experiment_name: str = "ravden"):
        self.tracking_uri = tracking_uri
        self.experiment_name = experiment_name
        self._setup_mlflow()

    def _setup_mlflow(self):
        """Setup MLflow tracking"""
        try:
            mlflow.set_tracking_uri(self.tracking_uri)
            mlflow.set_experiment(self.experiment_name)
            logger.info(f"MLflow setup complete: {self.tracking_uri}, experiment: {self.experiment_name}")
        except Exception as e:
            logger.error(f"Error setting up MLflow: {str(e)}")

    def log_run(
        self,
        command: str,
        parameters: Dict[str, Any],
        metrics: Dict[str, float],
        tags: Optional[Dict[str, str]] = None,
    ) -> bool:
        """Log one command invocation; tracking failures never fail the command"""
        run_name = f"{command}_{datetime.now().strftime('%Y%m%d_%H%M%S')}"
        run_tags = {"command": command, "timestamp": datetime.now().isoformat()}
        run_tags.update(tags or {})

        try:
            with mlflow.start_run(run_name=run_name, tags=run_tags):
                for param_name, param_value in parameters.items():
                    if isinstance(param_value, (int, float, str, bool)):
                        mlflow.log_param(param_name, param_value)
                    else:
                        mlflow.log_param(param_name, str(param_value))

                for metric_name, metric_value in metrics.items():
                    # mlflow rejects non-finite values
                    if metric_value is not None and math.isfinite(metric_value):
                        mlflow.log_metric(metric_name, float(metric_value))
            logger.info(f"Logged {command} run {run_name}")
            return True
        except Exception as e:
            logger.error(f"Error logging {command} run: {str(e)}")
            return False

    def get_experiment_results(self, experiment_name: str = None) -> Dict[str, Any]:
        """Get results from an experiment"""
        try:
            client = mlflow.tracking.MlflowClient(tracking_uri=self.tracking_uri)
            experiment = client.get_experiment_by_name(experiment_name or self.experiment_name)

            if not experiment:
                return {"error": "Experiment not found"}

            runs = client.search_runs(
                experiment_ids=[experiment.experiment_id],
                order_by=["attributes.start_time DESC"]
            )

            results = {
                "experiment_name": experiment_name or self.experiment_name,
                "total_runs": len(runs),
                "runs": []
            }

            for run in runs[:10]:
                results["runs"].append({
                    "run_id": run.info.run_id,
                    "run_name": run.data.tags.get("mlflow.runName", ""),
                    "status": run.info.status,
                    "metrics": run.data.metrics,
                    "params": run.data.params,
                    "tags": run.data.tags
                })

            return results

        except Exception as e:
            logger.error(f"Error getting experiment results: {str(e)}")
            return {"error": str(e)}
