//! Parses the bank listing, prints each employee method's sync labels and
//! the pretty-printed program.

use mac_core::{parse_program, pretty_print};

fn main() {
    let program = parse_program(mac_core::programs::BANK).unwrap_or_else(|e| panic!("{}", e.render("bank.mac")));
    let emp = program.interface("IEmployee").unwrap();
    for sig in &emp.sigs {
        println!("{:<10} {:?}", sig.name, sig.sync_labels());
    }

    // Errors carry a position.
    let err = parse_program("interface I {\n  Int m(;\n}").unwrap_err();
    println!("\n{}\n", err.render("broken.mac"));

    print!("{}", pretty_print(&program));
}
