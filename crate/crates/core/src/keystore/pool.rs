use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::RngCore;

use crate::bits::BitString;
use crate::error::{Error, Result};

pub const POOL_MAGIC: [u8; 4] = *b"CNRK";
pub const POOL_VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 16 + 8 + 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PoolId(pub [u8; 16]);

impl fmt::Display for PoolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

/// Source of one-time-pad key bits with a forward-only cursor.
pub trait KeySource {
    fn pool_id(&self) -> PoolId;

    /// Bits consumed so far.
    fn cursor(&self) -> u64;

    fn remaining(&self) -> u64;

    /// The next `n` unconsumed bits, without consuming them.
    fn peek(&self, n: usize) -> Result<BitString>;

    /// Consumes and returns the next `n` bits.
    fn take(&mut self, n: usize) -> Result<BitString>;
}

/// Pre-shared key material consumed front to back. Bits before the cursor
/// are never handed out again.
#[derive(Clone, PartialEq, Eq)]
pub struct KeyPool {
    id: PoolId,
    material: BitString,
    cursor: u64,
}

impl fmt::Debug for KeyPool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KeyPool")
            .field("id", &self.id)
            .field("len", &self.material.len())
            .field("cursor", &self.cursor)
            .finish_non_exhaustive()
    }
}

impl KeyPool {
    /// `nbits` fresh uniform bits from `rng`, cursor at 0. The pool id is
    /// also drawn from `rng`.
    pub fn generate<R: RngCore + ?Sized>(nbits: usize, rng: &mut R) -> Result<Self> {
        if nbits == 0 {
            return Err(Error::InvalidLength("key pool needs at least one bit".into()));
        }
        let mut id = [0u8; 16];
        rng.fill_bytes(&mut id);
        Ok(KeyPool {
            id: PoolId(id),
            material: BitString::random(rng, nbits),
            cursor: 0,
        })
    }

    pub fn from_material(id: PoolId, material: BitString) -> Self {
        KeyPool {
            id,
            material,
            cursor: 0,
        }
    }

    pub fn id(&self) -> PoolId {
        self.id
    }

    pub fn len(&self) -> u64 {
        self.material.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.material.is_empty()
    }

    fn check(&self, n: usize) -> Result<usize> {
        let remaining = self.remaining();
        if n as u64 > remaining {
            return Err(Error::KeyExhausted {
                requested: n as u64,
                remaining,
            });
        }
        Ok(self.cursor as usize)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.material.as_bytes().len());
        out.extend_from_slice(&POOL_MAGIC);
        out.push(POOL_VERSION);
        out.extend_from_slice(&self.id.0);
        out.extend_from_slice(&self.cursor.to_be_bytes());
        out.extend_from_slice(&(self.material.len() as u64).to_be_bytes());
        out.extend_from_slice(self.material.as_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |what: &str| Error::PoolFormat(what.to_owned());
        if bytes.len() < HEADER_LEN {
            return Err(bad("truncated header"));
        }
        if bytes[..4] != POOL_MAGIC {
            return Err(bad("bad magic"));
        }
        if bytes[4] != POOL_VERSION {
            return Err(bad(&format!("unsupported version {}", bytes[4])));
        }
        let id = PoolId(bytes[5..21].try_into().expect("16 bytes"));
        let cursor = u64::from_be_bytes(bytes[21..29].try_into().expect("8 bytes"));
        let len = u64::from_be_bytes(bytes[29..37].try_into().expect("8 bytes"));
        let body = &bytes[HEADER_LEN..];
        let len_usize = usize::try_from(len).map_err(|_| bad("material too large"))?;
        if body.len() != len_usize.div_ceil(8) {
            return Err(bad(&format!(
                "expected {} material bytes, found {}",
                len_usize.div_ceil(8),
                body.len()
            )));
        }
        if cursor > len {
            return Err(bad("cursor beyond material"));
        }
        let material = BitString::from_bytes(body, len_usize).map_err(|e| bad(&e.to_string()))?;
        if material.as_bytes() != body {
            return Err(bad("nonzero padding bits"));
        }
        Ok(KeyPool {
            id,
            material,
            cursor,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        File::open(path)?.read_to_end(&mut bytes)?;
        KeyPool::from_bytes(&bytes)
    }
}

impl KeySource for KeyPool {
    fn pool_id(&self) -> PoolId {
        self.id
    }

    fn cursor(&self) -> u64 {
        self.cursor
    }

    fn remaining(&self) -> u64 {
        self.len() - self.cursor
    }

    fn peek(&self, n: usize) -> Result<BitString> {
        let start = self.check(n)?;
        Ok(self.material.slice(start, start + n))
    }

    fn take(&mut self, n: usize) -> Result<BitString> {
        let bits = self.peek(n)?;
        self.cursor += n as u64;
        Ok(bits)
    }
}

/// Replaces `path` with `bytes` via a synced temporary file and a rename.
/// New files are readable by the owner only where the platform allows.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::PoolFormat(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    let mut opts = OpenOptions::new();
    opts.write(true).create(true).truncate(true);
    #[cfg(unix)]
    {
        use std::os::unix::fs::OpenOptionsExt;
        opts.mode(0o600);
    }
    let mut f = opts.open(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, path)?;
    #[cfg(unix)]
    if let Ok(d) = File::open(dir) {
        let _ = d.sync_all();
    }
    Ok(())
}

/// A key pool bound to its file.
///
/// Every `take` persists the advanced cursor and appends to the audit log
/// before the bits are returned, so a crash can waste key bits but never
/// lead to reissuing them.
#[derive(Debug)]
pub struct PersistentPool {
    path: PathBuf,
    pool: KeyPool,
}

impl PersistentPool {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let pool = KeyPool::load(&path)?;
        Ok(PersistentPool { path, pool })
    }

    /// Writes `pool` to `path` and binds to it.
    pub fn create(path: impl Into<PathBuf>, pool: KeyPool) -> Result<Self> {
        let path = path.into();
        pool.save(&path)?;
        Ok(PersistentPool { path, pool })
    }

    pub fn pool(&self) -> &KeyPool {
        &self.pool
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Path of the consumption log kept next to the pool file.
    pub fn log_path(&self) -> PathBuf {
        log_path(&self.path)
    }

    /// Lines of the consumption log: `take <start> <end>` per call.
    pub fn history(&self) -> Result<Vec<String>> {
        read_history(&self.path)
    }
}

pub fn log_path(pool_path: &Path) -> PathBuf {
    let mut p = pool_path.as_os_str().to_owned();
    p.push(".log");
    PathBuf::from(p)
}

pub fn read_history(pool_path: &Path) -> Result<Vec<String>> {
    match fs::read_to_string(log_path(pool_path)) {
        Ok(s) => Ok(s.lines().map(str::to_owned).collect()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(e.into()),
    }
}

impl KeySource for PersistentPool {
    fn pool_id(&self) -> PoolId {
        self.pool.id
    }

    fn cursor(&self) -> u64 {
        self.pool.cursor
    }

    fn remaining(&self) -> u64 {
        self.pool.remaining()
    }

    fn peek(&self, n: usize) -> Result<BitString> {
        self.pool.peek(n)
    }

    fn take(&mut self, n: usize) -> Result<BitString> {
        let start = self.pool.cursor;
        let mut advanced = self.pool.clone();
        let bits = advanced.take(n)?;
        advanced.save(&self.path)?;
        let mut log = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.log_path())?;
        writeln!(log, "take {start} {}", advanced.cursor)?;
        log.sync_all()?;
        self.pool = advanced;
        Ok(bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keystore::rng::SeededRandom;

    fn pool(n: usize) -> KeyPool {
        KeyPool::generate(n, &mut SeededRandom::insecure_from_seed(1)).unwrap()
    }

    #[test]
    fn generate_contract() {
        let p = pool(16);
        assert_eq!(p.len(), 16);
        assert_eq!(p.cursor(), 0);
        assert_eq!(pool(16), p);
        assert!(matches!(
            KeyPool::generate(0, &mut SeededRandom::insecure_from_seed(1)),
            Err(Error::InvalidLength(_))
        ));
    }

    #[test]
    fn take_advances_cursor_over_disjoint_ranges() {
        let mut p = pool(8);
        let all = p.peek(8).unwrap();
        let a = p.take(3).unwrap();
        let b = p.take(3).unwrap();
        assert_eq!(p.cursor(), 6);
        assert_eq!(a, all.slice(0, 3));
        assert_eq!(b, all.slice(3, 6));
        assert!(matches!(p.take(3), Err(Error::KeyExhausted { requested: 3, remaining: 2 })));
        assert_eq!(p.cursor(), 6);
        assert!(p.take(0).unwrap().is_empty());
        assert_eq!(p.cursor(), 6);
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.pool");
        let mut p = pool(100);
        p.take(5).unwrap();
        p.save(&path).unwrap();
        let q = KeyPool::load(&path).unwrap();
        assert_eq!(q, p);
        assert_eq!(q.cursor(), 5);
    }

    #[cfg(unix)]
    #[test]
    fn pool_file_is_owner_only() {
        use std::os::unix::fs::PermissionsExt;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.pool");
        pool(8).save(&path).unwrap();
        let mode = fs::metadata(&path).unwrap().permissions().mode();
        assert_eq!(mode & 0o777, 0o600);
    }

    #[test]
    fn corrupt_files_rejected() {
        let bytes = pool(12).to_bytes();
        for cut in [0, 10, HEADER_LEN, bytes.len() - 1] {
            assert!(matches!(KeyPool::from_bytes(&bytes[..cut]), Err(Error::PoolFormat(_))));
        }
        let mut v = bytes.clone();
        v[4] = 2;
        assert!(KeyPool::from_bytes(&v).is_err());
        let mut m = bytes.clone();
        m[0] = b'X';
        assert!(KeyPool::from_bytes(&m).is_err());
        let mut c = bytes.clone();
        c[21..29].copy_from_slice(&13u64.to_be_bytes());
        assert!(KeyPool::from_bytes(&c).is_err());
        let mut pad = bytes.clone();
        *pad.last_mut().unwrap() |= 0x01;
        assert!(KeyPool::from_bytes(&pad).is_err());
        let mut extra = bytes;
        extra.push(0);
        assert!(KeyPool::from_bytes(&extra).is_err());
    }

    #[test]
    fn persistent_take_writes_ahead() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.pool");
        let mut pp = PersistentPool::create(&path, pool(64)).unwrap();
        let a = pp.take(10).unwrap();
        // the file already reflects the consumption
        assert_eq!(KeyPool::load(&path).unwrap().cursor(), 10);
        let mut reopened = PersistentPool::open(&path).unwrap();
        let b = reopened.take(10).unwrap();
        let full = pool(64).peek(64).unwrap();
        assert_eq!(a, full.slice(0, 10));
        assert_eq!(b, full.slice(10, 20));
        assert_eq!(reopened.history().unwrap(), ["take 0 10", "take 10 20"]);
        assert!(matches!(reopened.take(100), Err(Error::KeyExhausted { .. })));
        assert_eq!(KeyPool::load(&path).unwrap().cursor(), 20);
    }
}
