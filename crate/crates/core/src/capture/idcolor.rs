use super::CaptureError;

/// Ids must be below this to fit one 24-bit color.
pub const ID_COLOR_LIMIT: u32 = 1 << 24;

/// `(id mod 256, ⌊id/256⌋ mod 256, ⌊id/65536⌋ mod 256)`.
pub fn encode_id_color(id: u32) -> Result<[u8; 3], CaptureError> {
    if id >= ID_COLOR_LIMIT {
        return Err(CaptureError::IdOverflow(id));
    }
    Ok([id as u8, (id >> 8) as u8, (id >> 16) as u8])
}

pub fn decode_id_color(rgb: [u8; 3]) -> u32 {
    rgb[0] as u32 | (rgb[1] as u32) << 8 | (rgb[2] as u32) << 16
}
