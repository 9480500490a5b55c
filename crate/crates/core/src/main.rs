fn main() {
    let (text, code) = mpg_duel::cli::execute(std::env::args_os());
    if code == 0 || code == 1 {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
    std::process::exit(code);
}
