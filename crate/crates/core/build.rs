fn main() {
    // Banded LU factorizations come from the system LAPACK shipped with OpenBLAS.
    println!("cargo:rustc-link-lib=openblas");
}
