use std::fmt;
use std::io;
use std::path::Path;

pub const EXIT_MISSING: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;

/// An error message paired with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Failure { code: EXIT_DATA, message: message.into() }
    }

    pub fn io(path: &Path, e: io::Error) -> Self {
        xlex::Error::Io { path: path.to_path_buf(), source: e }.into()
    }
}

/// Prefixes errors that do not already name a file with `path`.
pub fn in_file(path: &Path) -> impl FnOnce(xlex::Error) -> Failure + '_ {
    move |e| {
        let named = matches!(e, xlex::Error::Io { .. });
        let mut f = Failure::from(e);
        if !named {
            f.message = format!("{}: {}", path.display(), f.message);
        }
        f
    }
}

impl From<xlex::Error> for Failure {
    fn from(e: xlex::Error) -> Self {
        let code = match &e {
            xlex::Error::Io { source, .. } if source.kind() == io::ErrorKind::NotFound => EXIT_MISSING,
            xlex::Error::InvalidConfig(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Failure { code, message: e.to_string() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
