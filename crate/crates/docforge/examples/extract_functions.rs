//! Extract function signatures, docstrings, and parameter details from
//! Python source text.
//!
//!     cargo run --example extract_functions

use docforge::{
    extract_functions, extract_parameters, is_method, passes_function_filters, SourceFile,
};

const SOURCE: &str = r#"
def resample(series, rate, *, method="linear"):
    """Interpolate a series onto a new rate."""
    return _interp(series, rate, method)


class Catalog:
    def lookup(self, key, default=None):
        """Fetch an entry, or `default` when absent."""
        return self._entries.get(key, default)

    def clear(self):
        self._entries = {}


async def fetch_page(url: str, timeout: float = 10.0) -> bytes:
    return await _session.get(url, timeout=timeout)
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = SourceFile {
        path: "demo.py".to_string(),
        text: SOURCE.to_string(),
    };

    for record in extract_functions(&source)? {
        println!("{} (line {})", record.qualified_name, record.start_line);
        println!("  method:        {}", is_method(&record.qualified_name));
        println!("  returns value: {}", record.has_return_value);
        println!("  passes filters: {}", passes_function_filters(&record));
        if let Some(doc) = &record.raw_docstring {
            println!("  docstring:     {doc:?}");
        }
        // Effective parameters: the receiver is dropped and positions are
        // re-numbered from zero.
        for param in extract_parameters(&record) {
            print!("  param {}: {}", param.position, param.name);
            if let Some(annotation) = &param.annotation_text {
                print!(": {annotation}");
            }
            if let Some(default) = &param.default_text {
                print!(" = {default}");
            }
            println!("  [{:?}]", param.kind);
        }
        println!();
    }
    Ok(())
}
