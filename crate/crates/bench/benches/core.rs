use criterion::{black_box, criterion_group, criterion_main, Criterion};

use phigamma::construction::{glue, recover_filtered, verify_module};
use phigamma::corpus::{random_corpus, CorpusSpec};
use phigamma::filtered::{hn_slopes, is_admissible, FilteredModule};
use phigamma::robba::{LogRobbaElement, Profile, RobbaElement};

fn levels12() -> Profile {
    Profile::default().with_levels(1, 2)
}

fn slopes(c: &mut Criterion) {
    let corpus = random_corpus(&CorpusSpec::default(), 16, 5).unwrap();
    c.bench_function("hn_slopes/corpus16", |b| {
        b.iter(|| {
            for m in &corpus {
                black_box(hn_slopes(m).unwrap());
            }
        })
    });
    c.bench_function("is_admissible/corpus16", |b| {
        b.iter(|| {
            for m in &corpus {
                black_box(is_admissible(m).unwrap());
            }
        })
    });
}

fn iota(c: &mut Criterion) {
    let pr = Profile::default();
    let x = RobbaElement::x(pr);
    let y = LogRobbaElement::from_robba(x.add(&RobbaElement::t(pr)).unwrap()).add(&LogRobbaElement::ell(pr)).div_t(1);
    for n in 1..=3 {
        c.bench_function(&format!("iota/level{n}"), |b| b.iter(|| black_box(y.iota(n).unwrap())));
    }
}

fn construction(c: &mut Criterion) {
    let mut g = c.benchmark_group("construction");
    g.sample_size(10);
    for k in 1..=3 {
        let m = FilteredModule::example(k, 2).unwrap();
        g.bench_function(format!("glue/example{k}"), |b| b.iter(|| black_box(glue(&m, levels12()).unwrap())));
        let gm = glue(&m, levels12()).unwrap();
        g.bench_function(format!("verify/example{k}"), |b| b.iter(|| black_box(verify_module(&gm))));
        g.bench_function(format!("recover/example{k}"), |b| b.iter(|| black_box(recover_filtered(&gm).unwrap())));
    }
    g.finish();
}

criterion_group!(benches, slopes, iota, construction);
criterion_main!(benches);
