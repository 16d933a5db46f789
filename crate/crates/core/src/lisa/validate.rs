use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("unresolved label {label} in P{proc}")]
    UnresolvedLabel { proc: usize, label: String },
    #[error("condition refers to no process {0}")]
    NoProcess(usize),
    #[error("condition refers to unknown register {reg} of P{proc}")]
    UnknownRegister { proc: usize, reg: String },
    #[error("condition refers to unknown location {0}")]
    UnknownLocation(String),
}

/// Checks cross-references and fills in the annotation universe.
pub fn validate(mut test: LitmusTest) -> Result<LitmusTest, ValidationError> {
    for p in &test.processes {
        for instr in &p.code {
            let label = match instr {
                Instruction::Branch { label, .. } | Instruction::Jump { label } => label,
                _ => continue,
            };
            if p.label_target(label).is_none() {
                return Err(ValidationError::UnresolvedLabel {
                    proc: p.id,
                    label: label.clone(),
                });
            }
        }
    }

    let locations = test.locations();
    let mut atoms = Vec::new();
    test.final_cond.body.atoms(&mut atoms);
    for atom in atoms {
        match atom {
            Observable::Reg { proc, reg } => {
                let p = test
                    .processes
                    .get(*proc)
                    .ok_or(ValidationError::NoProcess(*proc))?;
                if !p.registers().contains(reg.as_str()) {
                    return Err(ValidationError::UnknownRegister {
                        proc: *proc,
                        reg: reg.clone(),
                    });
                }
            }
            Observable::Loc { loc } => {
                if !locations.contains(loc.as_str()) {
                    return Err(ValidationError::UnknownLocation(loc.clone()));
                }
            }
        }
    }

    let mut universe = BTreeSet::new();
    for p in &test.processes {
        for instr in &p.code {
            match instr {
                Instruction::Write { annotations, .. }
                | Instruction::Read { annotations, .. }
                | Instruction::Branch { annotations, .. }
                | Instruction::Fence { annotations } => {
                    universe.insert(annotations.clone());
                }
                _ => {}
            }
        }
    }
    test.annotation_universe = universe;
    Ok(test)
}
