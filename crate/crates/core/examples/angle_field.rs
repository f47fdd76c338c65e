//! Prints the bundled angle field network as JSON.

fn main() {
    println!("{}", nts_core::synthetic::angle_field().to_json());
}
