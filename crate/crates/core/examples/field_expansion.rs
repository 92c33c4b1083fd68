//! Ladder-operator series of the amplitude and phase factors, checked against
//! their closed forms, and the second-order ordered forms.

use ionlight::expansion::{closed_form, evaluate, ordered_p1_forms, terms, Caps, FunctionId, Sign};

fn main() -> ionlight::Result<()> {
    let (p0, q0) = (0.05, 0.1);
    let (p1, q1) = (0.01, 0.02);
    let ids = [
        FunctionId::A1,
        FunctionId::A2,
        FunctionId::B0(Sign::Plus),
        FunctionId::B1(Sign::Plus),
        FunctionId::B2(Sign::Plus),
    ];
    println!("p0 = {p0}, q0 = {q0}, substituted p1 = {p1}, q1 = {q1}\n");
    println!("{:>4} {:>6} {:>28} {:>10}", "f", "terms", "series", "error");
    for id in ids {
        let list = terms(id, p0, q0, Caps::new(10, 10))?;
        let v = evaluate(&list, p1, q1);
        let exact = match id {
            FunctionId::B0(_) => closed_form(id, p1, q1),
            _ => closed_form(id, p0 + p1, q0 + q1),
        };
        println!("{:>4} {:>6} {:>28} {:>10.2e}", id.label(), list.len(), format!("{v:.12}"), (v - exact).norm());
    }

    let form = ordered_p1_forms(FunctionId::A2, p0, q0, 4)?;
    println!("\nA2 through second order in p1 (columns: q1 power)");
    for k in 0..3 {
        let row: Vec<String> = (0..=4).map(|lq| format!("{:>10.5}", form.coefficient(k, lq).re)).collect();
        println!("p1^{k}: {}", row.join(" "));
    }
    Ok(())
}
