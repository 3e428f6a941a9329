pub mod exponents;
pub mod line_scan;
pub mod phase_diagram;
pub mod quantum;
pub mod trajectory;
