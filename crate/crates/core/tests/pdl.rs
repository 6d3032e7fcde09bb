use cutlab_core::pdl::*;
use cutlab_core::protocols::{run_deutsch, run_fr, run_wigner};

const NEG_PARSE: &str = include_str!("../corpus/negative/misspelled_verb.wfp");
const NEG_SELF: &str = include_str!("../corpus/negative/self_description.wfp");
const NEG_REV: &str = include_str!("../corpus/negative/reversal_outside_cut.wfp");

#[test]
fn bundled_files_parse_and_validate() {
    for (name, src) in corpus::ALL {
        let ast = parse(src).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(validate(&ast).is_empty(), "{name}: {:?}", validate(&ast));
    }
    assert_eq!(parse(corpus::WIGNER).unwrap().steps.len(), 6);
    assert_eq!(parse(corpus::DEUTSCH).unwrap().steps.len(), 5);
    let fr = parse(corpus::FR).unwrap();
    assert_eq!(fr.steps.len(), 9);
    assert_eq!(fr.predictions(), vec![(OutcomeLit { value: 1, bar: false }, OutcomeLit { value: 0, bar: true })]);
}

#[test]
fn single_system_declaration() {
    let ast = parse("system Q : qubit").unwrap();
    assert_eq!(ast.systems, vec![SystemDecl { name: "Q".into(), dim: 2 }]);
    let ast = parse("system X : dim 3 # qutrit\n").unwrap();
    assert_eq!(ast.systems[0].dim, 3);
}

#[test]
fn misspelled_verb_reports_position_and_expected() {
    let e = parse(NEG_PARSE).unwrap_err();
    assert_eq!((e.line, e.col), (3, 13));
    assert_eq!(e.found, "`prpare`");
    assert_eq!(e.expected.len(), VERBS.len());
    assert!(e.expected.contains(&"`prepare`".to_string()));
    assert_eq!(PdlError::from(e).exit_code(), 2);
    let e = parse("step 1: Bob prpare Q").unwrap_err();
    assert_eq!((e.line, e.col), (1, 13));
}

#[test]
fn step_numbers_must_be_dense() {
    let e = parse("system Q : qubit\nphysicist B cut {Q}\nstep 2: B isolate Q\n").unwrap_err();
    assert_eq!((e.line, e.col), (3, 6));
}

#[test]
fn negative_corpus_diagnostics() {
    let d = validate(&parse(NEG_SELF).unwrap());
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].kind.as_str(), "self-description");
    assert_eq!(d[0].step, Some(2));
    let d = validate(&parse(NEG_REV).unwrap());
    assert_eq!(d.len(), 1, "{d:?}");
    assert_eq!(d[0].kind.as_str(), "reversal outside cut");
    assert_eq!(d[0].step, Some(4));
    let err = compile_and_run(&parse(NEG_REV).unwrap()).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn other_diagnostics() {
    let src = "system Q : qubit\nsystem R : qubit\nphysicist A cut {Q}\nphysicist B cut {Q, R}\n\
               step 1: A measure Q in computational into R\nstep 2: B postselect R = 1bar\n\
               step 3: B reverse Q R to step 1\nstep 4: B predict (0bar, 1)\nstep 5: C infer Z\n";
    let d = validate(&parse(src).unwrap());
    let kinds: Vec<&str> = d.iter().map(|x| x.kind.as_str()).collect();
    assert!(kinds.contains(&"outcome mismatch"), "{kinds:?}");
    assert!(kinds.contains(&"non-unitary operation in reversal window"), "{kinds:?}");
    assert!(kinds.contains(&"undeclared label"), "{kinds:?}");
}

#[test]
fn compiled_traces_match_builtin_runners() {
    let w = run_source(corpus::WIGNER, "wigner").unwrap();
    assert!(w.max_deviation(&run_wigner().unwrap().0).unwrap() < 1e-10);
    let d = run_source(corpus::DEUTSCH, "deutsch").unwrap();
    assert!(d.max_deviation(&run_deutsch().unwrap()).unwrap() < 1e-10);
    let restore = (d.steps[1].global.matrix() - d.steps[3].global.matrix()).max_abs();
    assert!(restore < 1e-10);
    let f = run_source(corpus::FR, "fr").unwrap();
    assert!(f.max_deviation(&run_fr(true).unwrap().0).unwrap() < 1e-10);
    assert!((f.last().acceptance - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn pretty_print_round_trips_corpus() {
    for (_, src) in corpus::ALL {
        let ast = parse(src).unwrap();
        let again = parse(&pretty_print(&ast)).unwrap();
        assert_eq!(ast, again);
    }
}

#[test]
fn runtime_errors_carry_step() {
    let src = "system Q : qubit\nsystem R : qubit\nphysicist A cut {Q}\nstep 1: A measure Q in computational into R\nstep 2: A postselect R = 1\n";
    let e = run_source(src, "x").unwrap_err();
    assert_eq!(e.exit_code(), 3);
    assert!(matches!(e, PdlError::Runtime { step: 2, .. }));
}
