from pydantic_settings import BaseSettings

class Settings(BaseSettings):
    
    QFE_JOBS: int = 1
    QFE_ORDER: int = 30
    QFE_EULER_ORDER: int = 50
    QFE_EULER_KMAX: int = 24
    
    QFE_COUNT_CAP: int = 200
    QFE_KEEP_CAP: int = 64
    QFE_LOG_LEVEL: str = "INFO"
    
    class Config:
        env_file = ".env"

settings = Settings()
