//! Emits the loss-minimization model in LP text format for external solvers.
//!
//! Per epoch `h` the model carries four variables: the pre-clamp stock
//! `sh_h`, the post-clamp stock `s_h`, and the two losses `lp_h` (surplus)
//! and `lm_h` (stockout); plus one transfer variable `x_i` per visit. The
//! stock clamp is not encoded with `max()`: the equality
//! `s_h = sh_h - lp_h + lm_h` together with `0 <= s_h <= C`, `lp_h >= 0`,
//! `lm_h >= 0` and the minimizing objective pins each loss to exactly the
//! amount the clamp discards, because a unit of slack loss costs one in the
//! objective and moves the stock by one bike, which can save at most one
//! unit of later loss. The integrality section covers only the transfers
//! and is omitted for the LP relaxation.

use crate::model::Instance;

/// Structured form of the emitted file; [`LpModel::render`] serializes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpModel {
    /// Header comment lines, without the leading `\`.
    pub comments: Vec<String>,
    /// Variable names summed by the minimization objective.
    pub objective: Vec<String>,
    /// Named constraint rows, three per epoch: the virtual-stock balance,
    /// the loss-linking equality, and the stock cap.
    pub constraints: Vec<String>,
    /// Bounds section lines.
    pub bounds: Vec<String>,
    /// Names declared integer; empty for the LP relaxation.
    pub generals: Vec<String>,
    /// Total variable count: one transfer per visit plus four per epoch.
    pub variable_count: usize,
}

impl LpModel {
    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    /// Serializes to LP format text (UTF-8, LF line endings).
    pub fn render(&self) -> String {
        let mut out = String::new();
        for comment in &self.comments {
            out.push_str("\\ ");
            out.push_str(comment);
            out.push('\n');
        }
        out.push_str("Minimize\n");
        for (chunk_index, chunk) in self.objective.chunks(8).enumerate() {
            if chunk_index == 0 {
                out.push_str(" obj: ");
            } else {
                out.push_str("      + ");
            }
            out.push_str(&chunk.join(" + "));
            out.push('\n');
        }
        out.push_str("Subject To\n");
        for row in &self.constraints {
            out.push(' ');
            out.push_str(row);
            out.push('\n');
        }
        out.push_str("Bounds\n");
        for bound in &self.bounds {
            out.push(' ');
            out.push_str(bound);
            out.push('\n');
        }
        if !self.generals.is_empty() {
            out.push_str("Generals\n");
            for name in &self.generals {
                out.push(' ');
                out.push_str(name);
                out.push('\n');
            }
        }
        out.push_str("End\n");
        out
    }
}

/// Builds the model; `relax` drops the integrality declarations.
pub fn build_model(instance: &Instance, relax: bool) -> LpModel {
    let horizon = instance.horizon();
    let visit_count = instance.visit_count();
    let capacity = instance.capacity();

    let comments = vec![
        "One-station bike repositioning: minimize the total lost demand.".to_string(),
        "Per epoch h: sh_h pre-clamp stock, s_h post-clamp stock, lp_h surplus".to_string(),
        "loss, lm_h stockout loss; x_i is the transfer at visit i. The clamp".to_string(),
        "s_h = min(C, max(0, sh_h)) is linear here: s_h = sh_h - lp_h + lm_h".to_string(),
        "with 0 <= s_h <= C, losses >= 0, under a minimizing objective. Slack".to_string(),
        "in a loss variable costs one unit now and moves one bike, saving at".to_string(),
        "most one unit later, so optima pin the losses to the clamp values.".to_string(),
    ];

    let mut objective = Vec::with_capacity(2 * horizon);
    for h in 1..=horizon {
        objective.push(format!("lp_{h}"));
        objective.push(format!("lm_{h}"));
    }

    let mut constraints = Vec::with_capacity(3 * horizon);
    let mut next_visit = 0usize;
    let visits = instance.visits();
    for h in 1..=horizon {
        let mut transfer_term = String::new();
        if next_visit < visits.len() && visits[next_visit].epoch == h {
            transfer_term = format!(" - x_{}", next_visit + 1);
            next_visit += 1;
        }
        let demand = instance.demand_at(h);
        if h == 1 {
            constraints.push(format!(
                "bal_1: sh_1{transfer_term} = {}",
                instance.initial_stock() + demand
            ));
        } else {
            constraints.push(format!(
                "bal_{h}: sh_{h} - s_{}{transfer_term} = {demand}",
                h - 1
            ));
        }
        constraints.push(format!("def_{h}: s_{h} - sh_{h} + lp_{h} - lm_{h} = 0"));
        constraints.push(format!("cap_{h}: s_{h} <= {capacity}"));
    }

    let mut bounds = Vec::new();
    for (index, visit) in visits.iter().enumerate() {
        let (lower, upper) = visit.intervention_bounds();
        bounds.push(format!("{lower} <= x_{} <= {upper}", index + 1));
    }
    for h in 1..=horizon {
        bounds.push(format!("sh_{h} free"));
        bounds.push(format!("0 <= s_{h} <= {capacity}"));
        bounds.push(format!("lp_{h} >= 0"));
        bounds.push(format!("lm_{h} >= 0"));
    }

    let generals = if relax {
        Vec::new()
    } else {
        (1..=visit_count).map(|i| format!("x_{i}")).collect()
    };

    LpModel {
        comments,
        objective,
        constraints,
        bounds,
        generals,
        variable_count: visit_count + 4 * horizon,
    }
}

/// Renders the instance's model directly to LP text.
pub fn export_lp(instance: &Instance, relax: bool) -> String {
    build_model(instance, relax).render()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Visit;

    fn instance(capacity: i64, initial_stock: i64, demand: &[i64], visits: &[Visit]) -> Instance {
        Instance::new(capacity, initial_stock, demand.to_vec(), visits.to_vec()).unwrap()
    }

    #[test]
    fn single_epoch_model_is_frozen() {
        let inst = instance(1, 0, &[0], &[]);
        let model = build_model(&inst, false);
        assert_eq!(model.variable_count, 4);
        assert_eq!(model.objective, vec!["lp_1", "lm_1"]);
        let expected = "\
Minimize
 obj: lp_1 + lm_1
Subject To
 bal_1: sh_1 = 0
 def_1: s_1 - sh_1 + lp_1 - lm_1 = 0
 cap_1: s_1 <= 1
Bounds
 sh_1 free
 0 <= s_1 <= 1
 lp_1 >= 0
 lm_1 >= 0
End
";
        let rendered = export_lp(&inst, false);
        let body = rendered
            .lines()
            .filter(|line| !line.starts_with('\\'))
            .collect::<Vec<_>>()
            .join("\n")
            + "\n";
        assert_eq!(body, expected);
    }

    #[test]
    fn two_visit_model_rows_are_frozen() {
        let visits = [Visit::new(1, 0, 10), Visit::new(3, 0, 10)];
        let inst = instance(5, 0, &[7, 0, -6, 0], &visits);
        let model = build_model(&inst, false);
        assert_eq!(model.variable_count, 2 + 4 * 4);
        assert_eq!(model.constraint_count(), 3 * 4);
        assert_eq!(model.constraints[0], "bal_1: sh_1 - x_1 = 7");
        assert_eq!(model.constraints[3], "bal_2: sh_2 - s_1 = 0");
        assert_eq!(model.constraints[6], "bal_3: sh_3 - s_2 - x_2 = -6");
        assert_eq!(model.constraints[7], "def_3: s_3 - sh_3 + lp_3 - lm_3 = 0");
        assert_eq!(model.constraints[8], "cap_3: s_3 <= 5");
        assert_eq!(model.bounds[0], "-10 <= x_1 <= 0");
        assert_eq!(model.bounds[1], "-10 <= x_2 <= 0");
        assert_eq!(model.generals, vec!["x_1", "x_2"]);
    }

    #[test]
    fn relaxation_omits_the_integrality_section() {
        let visits = [Visit::new(2, 1, 3)];
        let inst = instance(4, 2, &[1, -2], &visits);
        let strict = export_lp(&inst, false);
        let relaxed = export_lp(&inst, true);
        assert!(strict.contains("Generals\n x_1\n"));
        assert!(!relaxed.contains("Generals"));
        assert!(relaxed.ends_with("End\n"));
    }

    #[test]
    fn counts_match_the_shape_for_any_instance() {
        for (m, w) in [(1usize, 0usize), (5, 2), (9, 4), (12, 1)] {
            let visits: Vec<Visit> = (0..w).map(|i| Visit::new(2 * i + 1, 1, 2)).collect();
            let inst = instance(7, 3, &vec![1; m], &visits);
            let model = build_model(&inst, false);
            assert_eq!(model.variable_count, w + 4 * m);
            assert_eq!(model.constraint_count(), 3 * m);
            assert_eq!(model.objective.len(), 2 * m);
            assert_eq!(model.generals.len(), w);
            // One transfer bound per visit, four bound lines per epoch.
            assert_eq!(model.bounds.len(), w + 4 * m);
        }
    }

    #[test]
    fn rendering_uses_lf_only() {
        let inst = instance(3, 1, &[1, -1, 0], &[]);
        let text = export_lp(&inst, true);
        assert!(!text.contains('\r'));
        assert!(text.ends_with("End\n"));
        assert!(text.starts_with('\\'));
    }
}
