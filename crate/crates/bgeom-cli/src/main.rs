fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = bgeom_cli::run::run(&args);
    println!("{}", out.stdout);
    std::process::exit(out.code);
}
