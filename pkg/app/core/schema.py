from pydantic import BaseModel, ConfigDict


class BaseSchema(BaseModel):
    """Base model for reports and exported values"""

    model_config = ConfigDict(
        frozen=True,
        populate_by_name=True,
        use_enum_values=True,  # Serialize enums as their plain values
        ser_json_inf_nan="constants",
    )
