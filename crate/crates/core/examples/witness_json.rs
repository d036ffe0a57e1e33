//! Writes the boundary witness `W_k` on `ℂ^d ⊗ ℂ^d` as operator JSON.

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("integer")).collect();
    let [k, d] = args[..] else {
        eprintln!("usage: witness_json K D");
        std::process::exit(64);
    };
    println!("{}", blockpos::witness_search::boundary_witness(k, d).to_json());
}
