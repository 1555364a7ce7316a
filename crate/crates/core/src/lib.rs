pub mod backends;
pub mod cparse;
pub mod driver;
pub mod energyrep;
pub mod extractor;
pub mod mlopt;
pub mod profiler;
pub mod synthesizer;
