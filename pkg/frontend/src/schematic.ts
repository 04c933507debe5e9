// Live beam-path diagram: two wedged crystals sliding against each other
// on a rotatable table.  Geometry is pure; painting happens in render().

export interface CrystalPose {
  /** 0..1 fraction of full travel. */
  fraction: number;
  /** Transversal offsets of the two crystals, opposite signs. */
  upperOffset: number;
  lowerOffset: number;
}

export function crystalPose(positionMm: number, travelMm: number): CrystalPose {
  const clamped = Math.min(Math.max(positionMm, 0), travelMm);
  const fraction = travelMm > 0 ? clamped / travelMm : 0;
  return { fraction, upperOffset: fraction, lowerOffset: -fraction };
}

export interface SchematicState {
  position_mm: number;
  travel_mm: number;
  table_rotation_deg: number;
  theta_deg: number;
  laser: string;
}

export function renderSchematic(
  ctx: CanvasRenderingContext2D,
  state: SchematicState,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  const cx = width / 2;
  const cy = height / 2;
  const pose = crystalPose(state.position_mm, state.travel_mm);
  const maxShift = height * 0.16;

  // beam
  ctx.strokeStyle = state.laser === "diode" ? "#d0452f" : "#e0483a";
  ctx.lineWidth = 2;
  ctx.setLineDash([]);
  ctx.beginPath();
  ctx.moveTo(10, cy);
  ctx.lineTo(width - 26, cy);
  ctx.stroke();
  ctx.beginPath();
  ctx.moveTo(width - 26, cy);
  ctx.lineTo(width - 36, cy - 5);
  ctx.moveTo(width - 26, cy);
  ctx.lineTo(width - 36, cy + 5);
  ctx.stroke();

  // rotatable table outline
  ctx.save();
  ctx.translate(cx, cy);
  ctx.rotate((state.table_rotation_deg * Math.PI) / 180);
  ctx.strokeStyle = "#47506b";
  ctx.lineWidth = 1;
  ctx.strokeRect(-70, -58, 140, 116);

  // the two trapezoidal crystals, moving oppositely
  const drawTrapezoid = (offset: number, flip: boolean) => {
    const w = 46;
    const thick = 26;
    const thin = 14;
    const yShift = offset * maxShift;
    ctx.beginPath();
    if (!flip) {
      ctx.moveTo(-w / 2, -thick / 2 + yShift);
      ctx.lineTo(w / 2, -thin / 2 + yShift);
      ctx.lineTo(w / 2, thin / 2 + yShift);
      ctx.lineTo(-w / 2, thick / 2 + yShift);
    } else {
      ctx.moveTo(-w / 2, -thin / 2 + yShift);
      ctx.lineTo(w / 2, -thick / 2 + yShift);
      ctx.lineTo(w / 2, thick / 2 + yShift);
      ctx.lineTo(-w / 2, thin / 2 + yShift);
    }
    ctx.closePath();
    ctx.fillStyle = "rgba(102, 153, 255, 0.25)";
    ctx.fill();
    ctx.strokeStyle = "#6e9bff";
    ctx.stroke();
  };
  drawTrapezoid(pose.upperOffset, false);
  drawTrapezoid(pose.lowerOffset, true);
  ctx.restore();

  // captions
  ctx.fillStyle = "#9aa3bd";
  ctx.font = "12px system-ui, sans-serif";
  ctx.textAlign = "left";
  ctx.fillText(`table ${state.table_rotation_deg.toFixed(1)} deg`, 10, 16);
  ctx.fillText(`theta ${state.theta_deg.toFixed(1)} deg`, 10, 32);
  ctx.textAlign = "right";
  ctx.fillText(
    `s = ${state.position_mm.toFixed(2)} / ${state.travel_mm.toFixed(1)} mm`,
    width - 10,
    16,
  );
}
