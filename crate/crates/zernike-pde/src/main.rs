fn main() {
    std::process::exit(zernike_pde::cli::run(std::env::args()));
}
