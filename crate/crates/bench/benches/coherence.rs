use criterion::{black_box, criterion_group, criterion_main, Criterion};
use surfhom_core::fusion::{builtin, verify};

fn coherence(c: &mut Criterion) {
    for name in ["fib", "ising", "pointed:4:1/4"] {
        let data = builtin(name).unwrap();
        c.bench_function(&format!("verify/{name}"), |b| b.iter(|| verify(black_box(&data))));
    }
}

criterion_group!(benches, coherence);
criterion_main!(benches);
