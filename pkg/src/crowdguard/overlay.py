"""Overlay rendering: colored person boxes for distance status, face boxes
annotated with mask / face-hand labels.

Decisions are first lowered into a structured draw-command list (pure data,
stable ordering) so external tools can render them and tests can compare
golden files without touching pixels; raster rendering consumes exactly that
command list.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .distancing import DistanceStatus
from .errors import GeometryMismatchError
from .formats import dumps_record
from .model import BoundingBox, ImageGeometry
from .report import FrameReport

RGB = tuple[int, int, int]


@dataclass(frozen=True)
class OverlayStyle:
    keeps_color: RGB = (0, 200, 0)
    violates_color: RGB = (220, 30, 30)
    unassessed_color: RGB = (128, 128, 128)
    face_color: RGB = (70, 130, 220)
    text_color: RGB = (255, 255, 255)
    thickness: int = 3
    text_offset: int = 12  # label baseline above the box top edge

    def __post_init__(self) -> None:
        if len({self.keeps_color, self.violates_color, self.unassessed_color}) != 3:
            raise ValueError("status colors must be distinct")

    def status_color(self, status: DistanceStatus) -> RGB:
        return {DistanceStatus.KEEPS: self.keeps_color,
                DistanceStatus.VIOLATES: self.violates_color,
                DistanceStatus.UNASSESSED: self.unassessed_color}[status]


@dataclass(frozen=True)
class DrawCommand:
    kind: str  # "rect" | "text"
    entity: str  # "face" | "person"
    ref_id: str
    color: RGB
    box: BoundingBox | None = None
    thickness: int | None = None
    text: str | None = None
    position: tuple[float, float] | None = None


def emit_overlay_commands(report: FrameReport,
                          style: OverlayStyle = OverlayStyle()) -> list[DrawCommand]:
    """Lower one frame report to draw commands, sorted by (entity kind, id)
    with each entity's rect before its text; pure and stable."""
    commands: list[DrawCommand] = []
    for rf in report.faces:
        a = rf.assessment
        commands.append(DrawCommand(kind="rect", entity="face", ref_id=a.face_id,
                                    color=style.face_color, box=rf.box,
                                    thickness=style.thickness))
        commands.append(DrawCommand(kind="text", entity="face", ref_id=a.face_id,
                                    color=style.text_color,
                                    text=f"{a.mask_label.value},{a.hand_label.value}",
                                    position=(rf.box.x_min,
                                              rf.box.y_min - style.text_offset)))
    for rs in report.subjects:
        commands.append(DrawCommand(kind="rect", entity="person",
                                    ref_id=rs.status.person_id,
                                    color=style.status_color(rs.status.status),
                                    box=rs.box, thickness=style.thickness))
    commands.sort(key=lambda c: (c.entity, c.ref_id, c.kind != "rect"))
    return commands


def command_to_record(command: DrawCommand) -> dict:
    record: dict = {"kind": command.kind, "entity": command.entity,
                    "id": command.ref_id, "color": list(command.color)}
    if command.box is not None:
        record["box"] = list(command.box.as_tuple())
    if command.thickness is not None:
        record["thickness"] = command.thickness
    if command.text is not None:
        record["text"] = command.text
    if command.position is not None:
        record["position"] = list(command.position)
    return record


def write_commands(path, frame_id: int, commands: Iterable[DrawCommand]) -> None:
    with open(path, "w", encoding="utf-8") as out:
        out.write(dumps_record({"kind": "overlay_header", "frame_id": frame_id}) + "\n")
        for command in commands:
            out.write(dumps_record(command_to_record(command)) + "\n")


def render_frame(image, report: FrameReport, style: OverlayStyle = OverlayStyle(),
                 geometry: ImageGeometry | None = None):
    """Draw the report onto a copy of `image` (a PIL image).

    The bundled default bitmap font keeps text output deterministic across
    runs and platforms.
    """
    from PIL import ImageDraw, ImageFont  # noqa: PLC0415

    if geometry is not None and image.size != (geometry.width, geometry.height):
        raise GeometryMismatchError(
            f"image is {image.size[0]}x{image.size[1]} but frame geometry is "
            f"{geometry.width}x{geometry.height}")
    annotated = image.convert("RGB")
    draw = ImageDraw.Draw(annotated)
    font = ImageFont.load_default()
    for command in emit_overlay_commands(report, style):
        if command.kind == "rect":
            x0, y0, x1, y1 = command.box.as_tuple()
            draw.rectangle([x0, y0, max(x0, x1 - 1), max(y0, y1 - 1)],
                           outline=command.color, width=command.thickness)
        else:
            x, y = command.position
            draw.text((x, max(0.0, y)), command.text, fill=command.color, font=font)
    return annotated
