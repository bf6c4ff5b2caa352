from pydantic import BaseSettings, validator
from dotenv import load_dotenv

from dscf.schema.schemas import RunConfig

load_dotenv()

class Settings(BaseSettings):
    artifact_dir: str = "artifacts"
    log_file: str = "dscf.log"
    log_level: str = "INFO"
    log_max_size_bytes: int = 1024 * 1024 * 10  # 10 MB
    log_backup_count: int = 1
    progress: bool = True

    float_dtype: str = "float64"
    n_levels: int = 5
    default_seed: int = 2019

    @validator("float_dtype")
    def check_dtype(cls, value):
        if value not in ("float64", "float32"):
            raise ValueError("float_dtype must be float64 or float32")
        return value

    class Config:
        env_file = '.env'
        env_file_encoding = 'utf-8'
        env_prefix = 'DSCF_'

class RunEnvironment(BaseSettings, RunConfig):
    """
    RunConfig fields read from DSCF_* variables; only the variables actually set count as set fields.
    """

    class Config:
        env_prefix = 'DSCF_'

settings = Settings()
