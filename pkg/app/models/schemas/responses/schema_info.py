from typing import Any

from pydantic import Field

from app.core.schema import BaseSchema
from app.models.types.check_id import CheckId


class SchemaInfo(BaseSchema):
    schema_id: str = Field(alias="schema")
    check_ids: list[CheckId]
    report: dict[str, Any]
