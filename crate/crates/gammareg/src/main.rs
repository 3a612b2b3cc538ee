fn main() {
    std::process::exit(gammareg::app::main_with(std::env::args_os()));
}
