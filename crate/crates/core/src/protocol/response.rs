use crate::capture::EncodedImage;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Response {
    /// Status line without the trailing newline.
    pub header: String,
    /// Encoded image following the status line, if any.
    pub payload: Option<Vec<u8>>,
}

impl Response {
    pub fn ok(text: impl AsRef<str>) -> Self {
        let text = text.as_ref();
        let header = if text.is_empty() {
            "OK".to_string()
        } else {
            format!("OK {text}")
        };
        Response {
            header,
            payload: None,
        }
    }

    pub fn err(code: &str, message: impl AsRef<str>) -> Self {
        Response {
            header: format!("ERR {code} {}", message.as_ref()),
            payload: None,
        }
    }

    /// `OK <format> <width> <height> <nbytes>` followed by the bytes.
    pub fn image(img: EncodedImage) -> Self {
        Response {
            header: format!(
                "OK {} {} {} {}",
                img.format,
                img.width,
                img.height,
                img.bytes.len()
            ),
            payload: Some(img.bytes),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.header == "OK" || self.header.starts_with("OK ")
    }

    /// Error code of an `ERR` response.
    pub fn error_code(&self) -> Option<&str> {
        self.header.strip_prefix("ERR ")?.split(' ').next()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let payload = self.payload.as_deref().unwrap_or_default();
        let mut out = Vec::with_capacity(self.header.len() + 1 + payload.len());
        out.extend_from_slice(self.header.as_bytes());
        out.push(b'\n');
        out.extend_from_slice(payload);
        out
    }
}

/// Shortest decimal that parses back to the same `f64`; `-0` prints as `0`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}
