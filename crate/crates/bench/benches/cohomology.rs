use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};

use deltagroup_core::cohomology::Cohomology;
use deltagroup_core::delta::{build_t_g_0, classify};
use deltagroup_core::{Cochain, FiniteGroup, GModule};

fn s3_sign() -> Arc<GModule> {
    let g = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let chi = g.characters_to_z2()[1].clone();
    Arc::new(GModule::sign(g, 3, &chi).unwrap())
}

fn cohomology(c: &mut Criterion) {
    let a = s3_sign();
    for n in [2, 3] {
        c.bench_function(&format!("H^{n}(S3, Z/3 sign)"), |b| {
            b.iter(|| Cohomology::new(a.clone()).cohomology_group(black_box(n)).unwrap())
        });
        c.bench_function(&format!("HS^{n}(S3, Z/3 sign)"), |b| {
            b.iter(|| Cohomology::new(a.clone()).symmetric_cohomology_group(black_box(n)).unwrap())
        });
    }
    let z2 = Arc::new(GModule::trivial(Arc::new(FiniteGroup::cyclic(2).unwrap()), 2, 1).unwrap());
    c.bench_function("classify(Z/2, Z/2)", |b| b.iter(|| classify(&Cohomology::new(z2.clone())).unwrap()));
}

fn cochains(c: &mut Criterion) {
    let a = s3_sign();
    let s = Cochain::from_fn(a, 3, |t| vec![(t[0] + 2 * t[1] + t[2]) as i64]).unwrap();
    c.bench_function("differential, S3 degree 3", |b| b.iter(|| black_box(&s).differential()));
    c.bench_function("symmetrize, S3 degree 3", |b| b.iter(|| black_box(&s).symmetrize()));
    let g = Arc::new(FiniteGroup::symmetric(3).unwrap());
    c.bench_function("verify T(S3,0)", |b| {
        let t = build_t_g_0(g.clone()).unwrap();
        b.iter(|| t.verify())
    });
}

criterion_group!(benches, cohomology, cochains);
criterion_main!(benches);
