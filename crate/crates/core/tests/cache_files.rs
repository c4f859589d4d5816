//! On-disk cache format: round trips, sharding and every rejection path.

use std::fs;

use glnlab_core::{kl_polynomial, CacheError, KlCache, Permutation};

fn filled(n: usize) -> KlCache {
    let cache = KlCache::new();
    let all: Vec<Permutation> = Permutation::all(n).collect();
    for w in &all {
        for x in &all {
            kl_polynomial(x, w, &cache).unwrap();
        }
    }
    cache
}

#[test]
fn save_load_save_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = filled(5);
    let (a, b) = (dir.path().join("a.klc"), dir.path().join("b.klc"));
    cache.save(5, &a).unwrap();
    KlCache::load(&a).unwrap().save(5, &b).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn reloaded_cache_answers_without_recomputing() {
    let dir = tempfile::tempdir().unwrap();
    let cache = filled(4);
    let path = dir.path().join("s4.klc");
    cache.save(4, &path).unwrap();
    let loaded = KlCache::load(&path).unwrap();
    let before = loaded.stats();
    let (x, w) = (
        Permutation::identity(4),
        "3412".parse::<Permutation>().unwrap(),
    );
    assert_eq!(kl_polynomial(&x, &w, &loaded).unwrap().coeffs(), &[1, 1]);
    assert_eq!(loaded.stats().columns, before.columns);
}

#[test]
fn sharded_directory_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = filled(4);
    let shards = cache.save_dir(dir.path()).unwrap();
    // one shard per length of a canonical column key, all within 0..=6
    assert!(!shards.is_empty() && shards.len() <= 7);
    let merged = KlCache::new();
    assert!(merged.load_dir_into(dir.path()).unwrap() > 0);
    for w in Permutation::all(4) {
        for x in Permutation::all(4) {
            assert_eq!(
                kl_polynomial(&x, &w, &merged).unwrap(),
                kl_polynomial(&x, &w, &cache).unwrap()
            );
        }
    }
    // loading the same shards twice adds nothing
    assert_eq!(merged.load_dir_into(dir.path()).unwrap(), 0);
}

#[test]
fn missing_directory_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        KlCache::new()
            .load_dir_into(&dir.path().join("absent"))
            .unwrap(),
        0
    );
}

fn saved_bytes() -> Vec<u8> {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.klc");
    filled(4).save(4, &path).unwrap();
    fs::read(path).unwrap()
}

fn load_bytes(bytes: &[u8]) -> Result<KlCache, CacheError> {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.klc");
    fs::write(&path, bytes).unwrap();
    KlCache::load(&path)
}

#[test]
fn empty_file_is_truncated() {
    assert!(matches!(load_bytes(&[]), Err(CacheError::Truncated)));
}

#[test]
fn wrong_magic() {
    let mut bytes = saved_bytes();
    bytes[0] = b'X';
    assert!(matches!(load_bytes(&bytes), Err(CacheError::BadMagic(_))));
}

#[test]
fn unknown_version() {
    let mut bytes = saved_bytes();
    bytes[4..8].copy_from_slice(&99u32.to_le_bytes());
    assert!(matches!(load_bytes(&bytes), Err(CacheError::Version(99))));
}

#[test]
fn truncated_file() {
    let bytes = saved_bytes();
    for cut in [5, 10, 20] {
        assert!(
            matches!(load_bytes(&bytes[..cut]), Err(CacheError::Truncated)),
            "cut at {cut}"
        );
    }
    let err = load_bytes(&bytes[..bytes.len() - 9]).err().unwrap();
    assert!(
        matches!(err, CacheError::Truncated | CacheError::Checksum { .. }),
        "{err}"
    );
}

#[test]
fn flipped_payload_bit_fails_checksum() {
    let mut bytes = saved_bytes();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x10;
    let err = load_bytes(&bytes).err().unwrap();
    assert!(
        matches!(err, CacheError::Checksum { .. } | CacheError::Corrupt(_)),
        "{err}"
    );
}

#[test]
fn flipped_checksum_byte() {
    let mut bytes = saved_bytes();
    let last = bytes.len() - 1;
    bytes[last] ^= 0xff;
    assert!(matches!(
        load_bytes(&bytes),
        Err(CacheError::Checksum { .. })
    ));
}

#[test]
fn missing_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        KlCache::load(&dir.path().join("nope.klc")),
        Err(CacheError::Io(_))
    ));
}
